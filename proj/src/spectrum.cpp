#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "chiraldyn/dynamics.hpp"
#include "chiraldyn/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chiraldyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using ComplexMatrix = Eigen::MatrixXcd;

void check_grid(const std::vector<double>& freq_hz) {
    if (freq_hz.empty()) throw std::invalid_argument("spectrum: empty frequency grid");
    for (size_t i = 1; i < freq_hz.size(); ++i)
        if (!(freq_hz[i] > freq_hz[i - 1]))
            throw std::invalid_argument("spectrum: frequency grid must be strictly increasing");
}

// One bin of the symmetrized output spectrum for every selector at once.
// T(w) = C M B - E with M = (i w' I - A)^{-1}; the value for selector s is
// s^T Re[T T^dagger] s = |T^dagger s|^2, so far off resonance (M -> 0) each
// normalized selector reads exactly 1.
void spectrum_bin(const DriftDiffusion& dd, const std::vector<QuadratureSelector>& selectors,
                  double omega_prime, double* out) {
    const Eigen::Index n = dd.A.rows();
    ComplexMatrix m = std::complex<double>(0.0, omega_prime) * ComplexMatrix::Identity(n, n) -
                      dd.A.cast<std::complex<double>>();
    ComplexMatrix t = dd.C.cast<std::complex<double>>() *
                          m.partialPivLu().solve(dd.B.cast<std::complex<double>>()) -
                      dd.E.cast<std::complex<double>>();
    for (size_t s = 0; s < selectors.size(); ++s) {
        const Eigen::Vector4cd w = selectors[s].weights.cast<std::complex<double>>();
        out[s] = (t.adjoint() * w).squaredNorm();
    }
}

NoiseSpectrum analytic_spectrum(const DriftDiffusion& dd,
                                const std::vector<QuadratureSelector>& selectors,
                                const std::vector<double>& freq_hz, double bandwidth_hz,
                                bool parallel) {
    check_grid(freq_hz);
    if (selectors.empty()) throw std::invalid_argument("spectrum: no selectors given");
    if (dd.C.rows() != 4)
        throw std::invalid_argument("spectrum: model exposes 4 monitored quadratures");
    if (!dd.stable) throw NoSteadyState("output_noise_spectrum: drift matrix is not stable");
    if (bandwidth_hz < 0.0) throw std::invalid_argument("spectrum: bandwidth_hz must be >= 0");

    const int npts = static_cast<int>(freq_hz.size());
    const int nsel = static_cast<int>(selectors.size());
    std::vector<double> flat(static_cast<size_t>(npts) * nsel);

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < npts; ++i)
            spectrum_bin(dd, selectors, kTwoPi * (freq_hz[i] - dd.carrier_hz),
                         &flat[static_cast<size_t>(i) * nsel]);
    } else {
        for (int i = 0; i < npts; ++i)
            spectrum_bin(dd, selectors, kTwoPi * (freq_hz[i] - dd.carrier_hz),
                         &flat[static_cast<size_t>(i) * nsel]);
    }

    NoiseSpectrum spec;
    spec.freq_hz = freq_hz;
    spec.bandwidth_hz = bandwidth_hz;
    for (int s = 0; s < nsel; ++s) {
        std::vector<double> series(npts);
        for (int i = 0; i < npts; ++i) series[i] = flat[static_cast<size_t>(i) * nsel + s];
        spec.series[selectors[s].label] = std::move(series);
    }
    if (bandwidth_hz > 0.0 && npts > 1) {
        double max_step = 0.0;
        for (int i = 1; i < npts; ++i) max_step = std::max(max_step, freq_hz[i] - freq_hz[i - 1]);
        if (max_step > bandwidth_hz / 2.0) {
            std::ostringstream msg;
            msg << "grid spacing " << max_step << " Hz cannot resolve features of width "
                << bandwidth_hz << " Hz";
            spec.warning = msg.str();
        }
    }
    return spec;
}

// Deterministic normal deviates: explicit Box-Muller on top of the (fully
// specified) mt19937_64 stream, so results are identical across platforms.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

  private:
    double uniform() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// In-place radix-2 decimation-in-time FFT; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

int auto_nfft(long long total_samples) {
    int nfft = 256;
    while (2LL * nfft <= total_samples / 16 && nfft < 65536) nfft *= 2;
    return nfft;
}

} // namespace

QuadratureSelector selector_from_label(const std::string& label) {
    QuadratureSelector s;
    s.label = label;
    const double r = 1.0 / std::sqrt(2.0);
    if (label == "x1") s.weights << 1, 0, 0, 0;
    else if (label == "p1") s.weights << 0, 1, 0, 0;
    else if (label == "x2") s.weights << 0, 0, 1, 0;
    else if (label == "p2") s.weights << 0, 0, 0, 1;
    else if (label == "xminus") s.weights << r, 0, -r, 0;
    else if (label == "xplus") s.weights << r, 0, r, 0;
    else if (label == "pminus") s.weights << 0, r, 0, -r;
    else if (label == "pplus") s.weights << 0, r, 0, r;
    else
        throw std::invalid_argument("selector_from_label: unknown label '" + label +
                                    "' (expected x1, p1, x2, p2, xminus, xplus, pminus, pplus)");
    return s;
}

std::vector<QuadratureSelector> standard_selectors() {
    std::vector<QuadratureSelector> v;
    for (const char* l : {"x1", "p1", "x2", "p2", "xminus", "xplus", "pminus", "pplus"})
        v.push_back(selector_from_label(l));
    return v;
}

NoiseSpectrum output_noise_spectrum(const DriftDiffusion& dd,
                                    const std::vector<QuadratureSelector>& selectors,
                                    const std::vector<double>& freq_hz, double bandwidth_hz) {
    return analytic_spectrum(dd, selectors, freq_hz, bandwidth_hz, true);
}

NoiseSpectrum output_noise_spectrum_serial(const DriftDiffusion& dd,
                                           const std::vector<QuadratureSelector>& selectors,
                                           const std::vector<double>& freq_hz,
                                           double bandwidth_hz) {
    return analytic_spectrum(dd, selectors, freq_hz, bandwidth_hz, false);
}

NoiseSpectrum stochastic_trajectory_spectrum(const DriftDiffusion& dd,
                                             const QuadratureSelector& selector,
                                             double duration, double dt, std::uint64_t seed,
                                             int nfft) {
    if (!dd.stable)
        throw NoSteadyState("stochastic_trajectory_spectrum: drift matrix is not stable");
    if (dt <= 0.0) throw std::invalid_argument("stochastic_trajectory_spectrum: dt must be > 0");
    Eigen::EigenSolver<Matrix> es(dd.A, /*computeEigenvectors=*/false);
    const double speed = es.eigenvalues().cwiseAbs().maxCoeff();
    const double slowest = -es.eigenvalues().real().maxCoeff();
    if (speed > 0.0 && dt > 0.05 / speed) {
        std::ostringstream msg;
        msg << "stochastic_trajectory_spectrum: dt " << dt << " too coarse; need <= "
            << 0.05 / speed;
        throw std::invalid_argument(msg.str());
    }

    const long long total = static_cast<long long>(std::floor(duration / dt));
    if (nfft == 0) nfft = auto_nfft(total);
    if (nfft < 2 || (nfft & (nfft - 1)) != 0)
        throw std::invalid_argument("stochastic_trajectory_spectrum: nfft must be a power of two");
    const long long nseg = total / nfft;
    if (nseg < 2)
        throw std::invalid_argument(
            "stochastic_trajectory_spectrum: duration too short for two segments");

    NoiseSpectrum spec;
    if (duration < 100.0 / std::max(slowest, 1e-300)) {
        std::ostringstream msg;
        msg << "duration " << duration << " s is below 100x the slowest decay time; "
            << "spectrum estimate variance will be elevated";
        spec.warning = msg.str();
    }

    const Eigen::Index n = dd.A.rows();
    const Eigen::Index m = dd.B.cols();
    const Eigen::Vector4d w = selector.weights;
    const double sdt = std::sqrt(dt);
    GaussianStream gauss(seed);

    // Hann window and its power normalization.
    std::vector<double> window(nfft);
    double wsum2 = 0.0;
    for (int i = 0; i < nfft; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(kTwoPi * i / nfft));
        wsum2 += window[i] * window[i];
    }

    // Discard a transient of 10 slowest decay times before collecting segments.
    const long long burn = std::min(
        total, static_cast<long long>(std::ceil(10.0 / std::max(slowest, 1e-300) / dt)));

    Vector r = Vector::Zero(n);
    Vector dw(m);
    std::vector<double> mean(nfft, 0.0), m2(nfft, 0.0);
    std::vector<std::complex<double>> seg(nfft);

    const Vector cw = dd.C.transpose() * w;  // pulls s^T C R in one dot product
    const Vector ew = dd.E.transpose() * w;

    for (long long k = 0; k < burn; ++k) {
        for (Eigen::Index j = 0; j < m; ++j) dw[j] = sdt * gauss.next();
        r += dd.A * r * dt + dd.B * dw;
    }
    for (long long s = 0; s < nseg; ++s) {
        for (int i = 0; i < nfft; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) dw[j] = sdt * gauss.next();
            // Integrated output increment over this step: s^T (C R dt - E dW).
            const double y = cw.dot(r) * dt - ew.dot(dw);
            seg[i] = window[i] * y;
            r += dd.A * r * dt + dd.B * dw;
        }
        fft_pow2(seg);
        // Welch running mean/variance per bin across segments.
        for (int i = 0; i < nfft; ++i) {
            const double p = std::norm(seg[i]) / (dt * wsum2);
            const double delta = p - mean[i];
            mean[i] += delta / static_cast<double>(s + 1);
            m2[i] += delta * (p - mean[i]);
        }
    }

    // Map FFT bins to absolute frequency: bin k is carrier + k df for
    // k < nfft/2 and carrier + (k - nfft) df above, presented in ascending order.
    const double df = 1.0 / (dt * nfft);
    std::vector<double> freq(nfft), power(nfft), se(nfft);
    for (int k = 0; k < nfft; ++k) {
        const int src = (k + nfft / 2) % nfft;             // FFT bin index
        const int offset = k - nfft / 2;                   // signed bin offset
        freq[k] = dd.carrier_hz + offset * df;
        power[k] = mean[src];
        const double var = (nseg > 1) ? m2[src] / static_cast<double>(nseg - 1) : 0.0;
        se[k] = std::sqrt(var / static_cast<double>(nseg));
    }

    spec.freq_hz = std::move(freq);
    spec.series[selector.label] = std::move(power);
    spec.stderr_est[selector.label] = std::move(se);
    return spec;
}

std::string spectrum_to_csv(const NoiseSpectrum& spectrum) {
    std::string out = "freq_hz";
    for (const auto& [label, values] : spectrum.series) out += "," + label;
    out += "\n";
    char buf[64];
    for (size_t i = 0; i < spectrum.freq_hz.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g", spectrum.freq_hz[i]);
        out += buf;
        for (const auto& [label, values] : spectrum.series) {
            std::snprintf(buf, sizeof(buf), "%.12g", values[i]);
            out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

} // namespace chiraldyn
