#include "chiraldyn/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chiraldyn/errors.hpp"

namespace chiraldyn {

FloquetDrive::FloquetDrive(double nu1_hz_, double b1_, double b0_, double gyromag_,
                           double k_u_, int n_max_, double carrier_offset_hz_)
    : nu1_hz(nu1_hz_), b1(b1_), b0(b0_), gyromag(gyromag_), k_u(k_u_), n_max(n_max_),
      carrier_offset_hz(carrier_offset_hz_) {
    if (nu1_hz <= 0.0) throw std::invalid_argument("FloquetDrive: nu1_hz must be > 0");
    if (b1 < 0.0) throw std::invalid_argument("FloquetDrive: b1 must be >= 0");
    if (gyromag <= 0.0) throw std::invalid_argument("FloquetDrive: gyromag must be > 0");
    if (n_max < 0 || n_max > 10)
        throw std::invalid_argument("FloquetDrive: n_max must be in 0..10");
    if (!std::isfinite(modulation_index(*this)))
        throw std::invalid_argument("FloquetDrive: modulation index is not finite");
}

double quasi_energy(int sign, int n, double omega0, double omega1) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("quasi_energy: sign must be +1 or -1");
    return sign * omega0 + n * omega1;
}

double modulation_index(const FloquetDrive& drive) {
    if (drive.nu1_hz == 0.0)
        throw std::invalid_argument("modulation_index: modulation frequency is zero");
    // pi * gyromag * b1 / omega1 with omega1 = 2 pi nu1.
    return drive.gyromag * drive.b1 / (2.0 * drive.nu1_hz);
}

double sideband_weight(int n, const FloquetDrive& drive) {
    if (std::abs(n) > drive.n_max) {
        std::ostringstream msg;
        msg << "sideband_weight: |n| = " << std::abs(n) << " beyond truncation n_max = "
            << drive.n_max;
        throw std::invalid_argument(msg.str());
    }
    return bessel_j(n, modulation_index(drive));
}

NoiseSpectrum multicolor_spectrum(const ThreeModeModel& base, const FloquetDrive& drive,
                                  const std::vector<QuadratureSelector>& selectors,
                                  const std::vector<double>& freq_hz) {
    const double index = modulation_index(drive);
    NoiseSpectrum total;
    total.freq_hz = freq_hz;
    for (const auto& sel : selectors)
        total.series[sel.label] = std::vector<double>(freq_hz.size(), 1.0);

    if (drive.nu1_hz < 3.0 * base.gamma_spin / (2.0 * std::numbers::pi)) {
        std::ostringstream msg;
        msg << "multicolor_spectrum: nu1 = " << drive.nu1_hz
            << " Hz is within 3x the correlation linewidth; sidebands overlap and the "
               "independent-sideband superposition degrades";
        total.warning = msg.str();
    }

    // Each sideband is an independent copy of the base dynamics with coupling
    // scaled by |J_n| and the carrier moved to carrier + offset + n nu1. The
    // deviations from shot noise add; the shot floor itself is counted once.
    for (int n = -drive.n_max; n <= drive.n_max; ++n) {
        const double weight = std::abs(bessel_j(n, index));
        ThreeModeModel side = base;
        side.g1 = base.g1 * weight;
        side.g2 = base.g2 * weight;
        side.carrier_hz = base.carrier_hz + drive.carrier_offset_hz + n * drive.nu1_hz;
        const NoiseSpectrum s =
            output_noise_spectrum(drift_diffusion(side), selectors, freq_hz, 0.0);
        for (const auto& sel : selectors) {
            const auto& src = s.series.at(sel.label);
            auto& dst = total.series[sel.label];
            for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] - 1.0;
        }
    }
    return total;
}

BesselFit bessel_fit(const std::vector<double>& nu1_hz, const std::vector<double>& amplitudes,
                     int order) {
    if (order != 0 && order != 1)
        throw std::invalid_argument("bessel_fit: order must be 0 or 1");
    if (nu1_hz.size() != amplitudes.size())
        throw std::invalid_argument("bessel_fit: mismatched input lengths");
    if (nu1_hz.size() < 5)
        throw std::invalid_argument("bessel_fit: need at least 5 data points");
    double nu_min = nu1_hz[0], nu_max = nu1_hz[0];
    for (double nu : nu1_hz) {
        if (nu <= 0.0) throw std::invalid_argument("bessel_fit: nu1 values must be > 0");
        nu_min = std::min(nu_min, nu);
        nu_max = std::max(nu_max, nu);
    }
    const double spread = *std::max_element(amplitudes.begin(), amplitudes.end()) -
                          *std::min_element(amplitudes.begin(), amplitudes.end());
    const double scale = std::max(std::abs(*std::max_element(
                                      amplitudes.begin(), amplitudes.end(),
                                      [](double a, double b) { return std::abs(a) < std::abs(b); })),
                                  1e-300);
    if (spread <= 1e-12 * scale)
        throw NumericFailure("bessel_fit: degenerate data (all amplitudes equal)");

    const size_t npts = nu1_hz.size();
    // For fixed k the amplitude is linear, so a(k) has a closed form and the
    // fit reduces to a 1-D search over k.
    const auto sse = [&](double k, double* a_out) {
        double mm = 0.0, my = 0.0;
        for (size_t i = 0; i < npts; ++i) {
            const double m = bessel_j(order, k / nu1_hz[i]);
            mm += m * m;
            my += m * amplitudes[i];
        }
        const double a = mm > 1e-300 ? my / mm : 0.0;
        if (a_out) *a_out = a;
        double s = 0.0;
        for (size_t i = 0; i < npts; ++i) {
            const double r = amplitudes[i] - a * bessel_j(order, k / nu1_hz[i]);
            s += r * r;
        }
        return s;
    };

    // Deterministic multistart: dense grid over a generous k range, then
    // golden-section refinement around the best cell.
    const double k_lo = 1e-3 * nu_min;
    const double k_hi = 20.0 * nu_max;  // arguments up to ~20/nu_min covered by bessel_j
    const int cells = 2000;
    double best_k = k_lo, best_s = sse(k_lo, nullptr);
    for (int i = 1; i <= cells; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / cells;
        const double s = sse(k, nullptr);
        if (s < best_s) {
            best_s = s;
            best_k = k;
        }
    }
    double lo = std::max(k_lo, best_k - (k_hi - k_lo) / cells);
    double hi = std::min(k_hi, best_k + (k_hi - k_lo) / cells);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = sse(c, nullptr), fd = sse(d, nullptr);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = sse(c, nullptr);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = sse(d, nullptr);
        }
    }
    BesselFit fit;
    fit.k_u = (lo + hi) / 2.0;
    fit.residual_rms = std::sqrt(sse(fit.k_u, &fit.amplitude) / static_cast<double>(npts));
    return fit;
}

CrossSidebandCoupling cross_sideband_weight(int n1, int n2, double delta0_hz,
                                            const FloquetDrive& drive, double linewidth_hz) {
    if (std::abs(n1) > drive.n_max || std::abs(n2) > drive.n_max)
        throw std::invalid_argument("cross_sideband_weight: sideband order beyond n_max");
    const double index = modulation_index(drive);
    CrossSidebandCoupling c;
    c.resonant = std::abs(delta0_hz - (n1 - n2) * drive.nu1_hz) <= linewidth_hz;
    c.weight = bessel_j(n1, index) * bessel_j(n2, index);
    return c;
}

} // namespace chiraldyn
