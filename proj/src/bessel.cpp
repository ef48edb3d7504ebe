#include <cmath>
#include <stdexcept>
#include <vector>

#include "chiraldyn/floquet.hpp"

namespace chiraldyn {

namespace {

// Power series around 0; converges fast for small |x|.
double bessel_series(int n, double x) {
    const double half = x / 2.0;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k;  // (x/2)^n / n!
    double sum = term;
    const double q = -half * half;
    for (int m = 1; m < 64; ++m) {
        term *= q / (m * (m + n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// Miller's backward recurrence, normalized by J0 + 2*sum J_{2k} = 1.
double bessel_backward(int n, double x) {
    const int start = 2 * (n + static_cast<int>(std::ceil(std::sqrt(40.0 * (n + 1)))) +
                           static_cast<int>(x)) + 20;
    double jp2 = 0.0, jp1 = 1e-30, norm = 0.0, result = 0.0;
    for (int k = start; k >= 0; --k) {
        const double j = 2.0 * (k + 1) / x * jp1 - jp2;
        jp2 = jp1;
        jp1 = j;
        if (k == n) result = j;
        if (k > 0 && k % 2 == 0) norm += 2.0 * j;
        if (std::abs(jp1) > 1e250) {  // rescale to dodge overflow on long descents
            jp1 *= 1e-250;
            jp2 *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    norm += jp1;
    return result / norm;
}

} // namespace

double bessel_j(int n, double x) {
    // Reduce to n >= 0, x >= 0 with J_{-n}(x) = (-1)^n J_n(x), J_n(-x) = (-1)^n J_n(x).
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2 == 1) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (n % 2 == 1) sign = -sign;
    }
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x < 0.5 || x < 0.25 * std::sqrt(static_cast<double>(n) + 1.0))
        return sign * bessel_series(n, x);
    return sign * bessel_backward(n, x);
}

} // namespace chiraldyn
