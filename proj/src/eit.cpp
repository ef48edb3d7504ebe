#include "chiraldyn/eit.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chiraldyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GaussHermiteRule {
    std::vector<double> nodes;    // in units of the thermal scale
    std::vector<double> weights;  // normalized to sum 1 (probabilists' average)
};

// Golub-Welsch: nodes/weights from the symmetric tridiagonal Jacobi matrix
// with off-diagonals sqrt(k/2); weights are the squared first components.
GaussHermiteRule build_rule(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double off = std::sqrt(k / 2.0);
        j(k - 1, k) = off;
        j(k, k - 1) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double w = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        rule.weights[i] = w;
        wsum += w;
    }
    for (double& w : rule.weights) w /= wsum;  // exact total weight sqrt(pi) divided out
    return rule;
}

const GaussHermiteRule& cached_rule(int n) {
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

std::complex<double> averaged(double delta_p, Geometry geom, const EitParams& p, int n) {
    const GaussHermiteRule& rule = cached_rule(n);
    std::complex<double> acc{0.0, 0.0};
    // Maxwell 1-D distribution exp(-(v/u)^2)/(u sqrt(pi)): Gauss-Hermite nodes
    // map to v = u * node with the normalized weights above.
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * lambda_chi(delta_p, p.u_thermal * rule.nodes[i], geom, p);
    return acc;
}

} // namespace

EitParams::EitParams(double rabi_c_, double gamma12_, double gamma3_, double delta_c_,
                     double k_, double u_thermal_, double od_)
    : rabi_c(rabi_c_), gamma12(gamma12_), gamma3(gamma3_), delta_c(delta_c_), k(k_),
      u_thermal(u_thermal_), od(od_) {
    if (rabi_c <= 0.0) throw std::invalid_argument("EitParams: rabi_c must be > 0");
    if (gamma12 <= 0.0) throw std::invalid_argument("EitParams: gamma12 must be > 0");
    if (gamma3 <= 0.0) throw std::invalid_argument("EitParams: gamma3 must be > 0");
    if (k <= 0.0) throw std::invalid_argument("EitParams: k must be > 0");
    if (u_thermal <= 0.0) throw std::invalid_argument("EitParams: u_thermal must be > 0");
    if (od < 0.0) throw std::invalid_argument("EitParams: od must be >= 0");
}

EitParams default_eit_params() {
    EitParams p;
    p.rabi_c = kTwoPi * 2.0e6;
    p.gamma12 = kTwoPi * 500.0;
    p.gamma3 = kTwoPi * 350.0e6;
    p.delta_c = 0.0;
    p.k = kTwoPi / 795.0e-9;
    p.u_thermal = 160.0;
    p.od = 3.0;
    return p;
}

std::complex<double> lambda_chi(double delta_p, double v, Geometry geom, const EitParams& p) {
    const std::complex<double> i{0.0, 1.0};
    const double delta1 = delta_p - p.k * v;  // one-photon, Doppler-shifted
    const double two_photon = delta_p - p.delta_c;
    const double delta2 =
        two_photon - (geom == Geometry::CounterPropagating ? 2.0 * p.k * v : 0.0);
    const std::complex<double> denom = p.gamma3 / 2.0 - i * delta1 +
                                       (p.rabi_c * p.rabi_c / 4.0) /
                                           (p.gamma12 - i * delta2);
    // (gamma3/2) * i / denom: bare resonant absorption (rabi_c -> 0, v = 0) is 1.
    return i * (p.gamma3 / 2.0) / denom;
}

AveragedChi doppler_averaged_chi(double delta_p, Geometry geom, const EitParams& p,
                                 int n_points) {
    if (n_points < 32)
        throw std::invalid_argument("doppler_averaged_chi: need n_points >= 32");
    AveragedChi out;
    out.chi = averaged(delta_p, geom, p, n_points);
    const std::complex<double> refined = averaged(delta_p, geom, p, 2 * n_points);
    out.refinement = std::abs(refined - out.chi) / std::max(std::abs(refined), 1e-300);
    out.converged = out.refinement <= 1e-6;
    return out;
}

namespace {

std::vector<double> transmission_impl(const std::vector<double>& delta_grid, Geometry geom,
                                      const EitParams& p, int n_points, bool parallel) {
    for (size_t i = 1; i < delta_grid.size(); ++i)
        if (!(delta_grid[i] > delta_grid[i - 1]))
            throw std::invalid_argument("transmission: detuning grid must be increasing");
    if (n_points < 32) throw std::invalid_argument("transmission: need n_points >= 32");
    cached_rule(n_points);  // build once before the parallel region
    std::vector<double> t(delta_grid.size());
    const int n = static_cast<int>(delta_grid.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i)
            t[i] = std::exp(-p.od * averaged(delta_grid[i], geom, p, n_points).imag());
    } else {
        for (int i = 0; i < n; ++i)
            t[i] = std::exp(-p.od * averaged(delta_grid[i], geom, p, n_points).imag());
    }
    return t;
}

} // namespace

std::vector<double> transmission(const std::vector<double>& delta_grid, Geometry geom,
                                 const EitParams& p, int n_points) {
    return transmission_impl(delta_grid, geom, p, n_points, true);
}

std::vector<double> transmission_serial(const std::vector<double>& delta_grid, Geometry geom,
                                        const EitParams& p, int n_points) {
    return transmission_impl(delta_grid, geom, p, n_points, false);
}

double eit_contrast(const std::vector<double>& t, IndexWindow baseline_window) {
    if (t.empty()) throw std::invalid_argument("eit_contrast: empty spectrum");
    if (baseline_window.lo < 0 || baseline_window.hi > static_cast<int>(t.size()) ||
        baseline_window.lo >= baseline_window.hi)
        throw std::invalid_argument("eit_contrast: baseline window outside the grid");
    double base = 0.0;
    for (int i = baseline_window.lo; i < baseline_window.hi; ++i) base += t[i];
    base /= static_cast<double>(baseline_window.hi - baseline_window.lo);
    const double peak = *std::max_element(t.begin(), t.end());
    return std::max(0.0, (peak - base) / base);
}

} // namespace chiraldyn
