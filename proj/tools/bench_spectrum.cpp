// Compares the OpenMP spectrum/transmission kernels against their serial
// reference implementations: wall time for each and the largest deviation.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chiraldyn/dynamics.hpp"
#include "chiraldyn/eit.hpp"

using namespace chiraldyn;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_series_diff(const NoiseSpectrum& a, const NoiseSpectrum& b) {
    double worst = 0.0;
    for (const auto& [label, va] : a.series) {
        const auto& vb = b.series.at(label);
        for (size_t i = 0; i < va.size(); ++i)
            worst = std::max(worst, std::abs(va[i] - vb[i]));
    }
    return worst;
}

} // namespace

int main() {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;

#ifdef _OPENMP
    if (const char* env = std::getenv("CHIRALDYN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    // --- output noise spectrum over a dense grid ---
    ModelParams p;
    p.gamma_spin = kTwoPi * 100.0;
    p.kappa1 = p.kappa2 = kTwoPi * 1000.0;
    const double gain = 0.35;
    p.g1 = p.g2 = std::sqrt(gain * p.gamma_spin * std::sqrt(p.kappa1 * p.kappa2)) / 2.0;
    p.carrier_hz = 298800.0;
    const ThreeModeModel model = build_model(CouplingKind::NHPA, p);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto selectors = standard_selectors();

    const int nbins = 200000;
    std::vector<double> grid(nbins);
    for (int i = 0; i < nbins; ++i)
        grid[i] = p.carrier_hz - 1000.0 + 2000.0 * i / (nbins - 1);

    auto t0 = std::chrono::steady_clock::now();
    const NoiseSpectrum serial = output_noise_spectrum_serial(dd, selectors, grid, 0.0);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const NoiseSpectrum parallel = output_noise_spectrum(dd, selectors, grid, 0.0);
    const double t_parallel = seconds_since(t0);

    std::printf("spectrum  %d bins x %zu selectors\n", nbins, selectors.size());
    std::printf("  serial   %8.3f s\n", t_serial);
    std::printf("  parallel %8.3f s   speedup %.2fx   max|diff| %.3g\n", t_parallel,
                t_serial / std::max(t_parallel, 1e-12), max_series_diff(serial, parallel));

    // --- Doppler-averaged transmission ---
    const EitParams eit = default_eit_params();
    const int npts = 4000;
    std::vector<double> detuning(npts);
    for (int i = 0; i < npts; ++i)
        detuning[i] = kTwoPi * (-100000.0 + 200000.0 * i / (npts - 1));

    t0 = std::chrono::steady_clock::now();
    const auto ts = transmission_serial(detuning, Geometry::CoPropagating, eit, 128);
    const double e_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto tp = transmission(detuning, Geometry::CoPropagating, eit, 128);
    const double e_parallel = seconds_since(t0);

    double worst = 0.0;
    for (int i = 0; i < npts; ++i) worst = std::max(worst, std::abs(ts[i] - tp[i]));
    std::printf("transmission  %d detunings, 128-node quadrature\n", npts);
    std::printf("  serial   %8.3f s\n", e_serial);
    std::printf("  parallel %8.3f s   speedup %.2fx   max|diff| %.3g\n", e_parallel,
                e_serial / std::max(e_parallel, 1e-12), worst);
    return 0;
}
