#include "chiraldyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chiraldyn {

namespace {

std::vector<double> centered_grid(double center, double span_hz, int points) {
    if (points < 1) throw std::invalid_argument("q_spectrum: points must be >= 1");
    if (points > 1 && span_hz <= 0.0)
        throw std::invalid_argument("q_spectrum: span_hz must be > 0");
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = center;
        return grid;
    }
    for (int i = 0; i < points; ++i)
        grid[i] = center - span_hz / 2.0 + span_hz * i / (points - 1);
    return grid;
}

const std::vector<QuadratureSelector>& q_selectors() {
    static const std::vector<QuadratureSelector> sel = {
        selector_from_label("x1"), selector_from_label("p1"), selector_from_label("x2"),
        selector_from_label("p2"), selector_from_label("xminus"),
        selector_from_label("pplus")};
    return sel;
}

NoiseSpectrum spectra_for(const ThreeModeModel& model, const FloquetDrive* drive,
                          const std::vector<QuadratureSelector>& selectors,
                          const std::vector<double>& grid, double bandwidth_hz) {
    if (drive) {
        NoiseSpectrum s = multicolor_spectrum(model, *drive, selectors, grid);
        s.bandwidth_hz = bandwidth_hz;
        return s;
    }
    return output_noise_spectrum(drift_diffusion(model), selectors, grid, bandwidth_hz);
}

} // namespace

QSpectrum q_spectrum(const ThreeModeModel& model, const FloquetDrive* drive, double span_hz,
                     int points, double bandwidth_hz) {
    QSpectrum out;
    out.carrier_hz = model.carrier_hz + (drive ? drive->carrier_offset_hz : 0.0);
    out.freq_hz = centered_grid(out.carrier_hz, span_hz, points);
    const NoiseSpectrum spec = spectra_for(model, drive, q_selectors(), out.freq_hz,
                                           bandwidth_hz);
    const auto& x1 = spec.series.at("x1");
    const auto& p1 = spec.series.at("p1");
    const auto& x2 = spec.series.at("x2");
    const auto& p2 = spec.series.at("p2");
    const auto& xm = spec.series.at("xminus");
    const auto& pp = spec.series.at("pplus");
    out.q.resize(out.freq_hz.size());
    for (size_t i = 0; i < out.q.size(); ++i) {
        JointVariances jv;
        jv.var_x1 = x1[i];
        jv.var_p1 = p1[i];
        jv.var_x2 = x2[i];
        jv.var_p2 = p2[i];
        jv.var_xminus = xm[i];
        jv.var_pplus = pp[i];
        out.q[i] = quantum_correlation_Q(jv);
    }
    size_t carrier_idx = 0;
    double best = std::abs(out.freq_hz[0] - out.carrier_hz);
    for (size_t i = 1; i < out.freq_hz.size(); ++i) {
        const double d = std::abs(out.freq_hz[i] - out.carrier_hz);
        if (d < best) {
            best = d;
            carrier_idx = i;
        }
    }
    out.q_carrier = out.q[carrier_idx];
    out.fwhm_hz = peak_fwhm(out.freq_hz, out.q, out.carrier_hz);
    return out;
}

double peak_fwhm(const std::vector<double>& freq_hz, const std::vector<double>& series,
                 double f0) {
    if (freq_hz.size() != series.size() || freq_hz.size() < 3) return 0.0;
    // Climb to the local maximum nearest f0, then walk both slopes down to the
    // half level, interpolating the crossings linearly.
    size_t peak = 0;
    double best = std::abs(freq_hz[0] - f0);
    for (size_t i = 1; i < freq_hz.size(); ++i) {
        const double d = std::abs(freq_hz[i] - f0);
        if (d < best) {
            best = d;
            peak = i;
        }
    }
    while (peak + 1 < series.size() && series[peak + 1] > series[peak]) ++peak;
    while (peak > 0 && series[peak - 1] > series[peak]) --peak;
    const double half = series[peak] / 2.0;
    if (!(series[peak] > 0.0)) return 0.0;

    double left = freq_hz.front();
    bool found_left = false;
    for (size_t i = peak; i-- > 0;) {
        if (series[i] <= half) {
            const double t = (half - series[i]) / (series[i + 1] - series[i]);
            left = freq_hz[i] + t * (freq_hz[i + 1] - freq_hz[i]);
            found_left = true;
            break;
        }
    }
    if (!found_left) return 0.0;  // never fell below half: width undefined
    double right = freq_hz.back();
    bool found_right = false;
    for (size_t i = peak + 1; i < series.size(); ++i) {
        if (series[i] <= half) {
            const double t = (series[i - 1] - half) / (series[i - 1] - series[i]);
            right = freq_hz[i - 1] + t * (freq_hz[i] - freq_hz[i - 1]);
            found_right = true;
            break;
        }
    }
    if (!found_right) return 0.0;
    return right - left;
}

SpectralDiscord discord_at_frequency(const ThreeModeModel& model, const FloquetDrive* drive,
                                     double freq_hz, MeasuredMode measured) {
    // The sum/difference spectral densities are exactly what joint homodyne
    // detection provides, so rebuild the covariance entries from them.
    std::vector<QuadratureSelector> sel = {
        selector_from_label("x1"),     selector_from_label("p1"),
        selector_from_label("x2"),     selector_from_label("p2"),
        selector_from_label("xminus"), selector_from_label("xplus"),
        selector_from_label("pminus"), selector_from_label("pplus")};
    const std::vector<double> grid = {freq_hz};
    const NoiseSpectrum spec = spectra_for(model, drive, sel, grid, 0.0);
    const double sx1 = spec.series.at("x1")[0];
    const double sp1 = spec.series.at("p1")[0];
    const double sx2 = spec.series.at("x2")[0];
    const double sp2 = spec.series.at("p2")[0];
    const double sxplus = spec.series.at("xplus")[0];
    const double spminus = spec.series.at("pminus")[0];

    // The normalized combinations carry a 1/2, so Var(X_A + X_B) = 2 * S_xplus.
    const ReconstructedCov rc = covariance_from_homodyne(sx1, sx2, 2.0 * sxplus, sp1, sp2,
                                                         2.0 * spminus);
    Matrix cov = Matrix::Zero(4, 4);
    cov(0, 0) = sx1;
    cov(1, 1) = sp1;
    cov(2, 2) = sx2;
    cov(3, 3) = sp2;
    cov(0, 2) = cov(2, 0) = rc.covXX;
    cov(1, 3) = cov(3, 1) = rc.covPP;

    SpectralDiscord out;
    out.cov = cov;
    out.discord = gaussian_discord(cov, measured);
    JointVariances jv = joint_variances_from_cov(cov);
    out.q = quantum_correlation_Q(jv);
    return out;
}

} // namespace chiraldyn
