#pragma once
// Spectra-to-metrics pipelines: Q versus analysis frequency, feature width
// extraction, and reconstruction of the spectral two-mode covariance at a
// chosen frequency for discord evaluation.
#include <vector>

#include "chiraldyn/dynamics.hpp"
#include "chiraldyn/floquet.hpp"
#include "chiraldyn/metrics.hpp"

namespace chiraldyn {

struct QSpectrum {
    std::vector<double> freq_hz;
    std::vector<double> q;         // Q evaluated bin by bin from spectral densities
    double q_carrier = 0.0;        // Q at the grid point nearest the carrier
    double fwhm_hz = 0.0;          // full width at half maximum of the carrier feature
    double carrier_hz = 0.0;       // effective carrier (includes drive offset)
};

// Q(f) from the single-channel and joint output spectral densities, on a grid
// of `points` frequencies spanning carrier +- span_hz/2. With a drive the
// per-sideband multicolor superposition is used and the carrier offset applies.
QSpectrum q_spectrum(const ThreeModeModel& model, const FloquetDrive* drive,
                     double span_hz, int points, double bandwidth_hz);

// Full width at half maximum of the series peak nearest f0, by linear
// interpolation of the half-maximum crossings; 0 when there is no peak.
double peak_fwhm(const std::vector<double>& freq_hz, const std::vector<double>& series,
                 double f0);

struct SpectralDiscord {
    Matrix cov;   // 4x4 two-mode covariance reconstructed at the analysis frequency
    DiscordResult discord;
    double q = 0.0;
};

// Reconstructs the two-mode covariance at analysis frequency freq_hz from the
// sum/difference homodyne spectral densities (the same combinations a power
// splitter provides) and evaluates Q and the Gaussian discord on it.
SpectralDiscord discord_at_frequency(const ThreeModeModel& model, const FloquetDrive* drive,
                                     double freq_hz, MeasuredMode measured);

} // namespace chiraldyn
