#pragma once
// Periodically driven Zeeman ladder: quasi-energies, Bessel-weighted sideband
// couplings, multicolor noise spectra, Bessel-shape fits, and cross-sideband
// resonance selection.
#include <vector>

#include "chiraldyn/dynamics.hpp"

namespace chiraldyn {

struct FloquetDrive {
    double nu1_hz = 0.0;    // modulation frequency, > 0
    double b1 = 0.0;        // oscillating field amplitude, field units, >= 0
    double b0 = 0.0;        // static field, field units
    double gyromag = 1.0;   // Hz per field unit, > 0
    double k_u = 0.0;       // drive-depth parameter, Hz
    int n_max = 0;          // sideband truncation, 0..10
    double carrier_offset_hz = 0.0;  // additive carrier shift under drive

    FloquetDrive() = default;
    FloquetDrive(double nu1_hz, double b1, double b0, double gyromag, double k_u,
                 int n_max, double carrier_offset_hz = 0.0);
};

// E_{sign,n} = sign * omega0 + n * omega1 (sign must be +1 or -1).
double quasi_energy(int sign, int n, double omega0, double omega1);

// pi * gyromag * b1 / omega1 = gyromag * b1 / (2 nu1).
double modulation_index(const FloquetDrive& drive);

// J_n evaluated by backward recurrence / series, 1e-12 for |x| <= 20.
double bessel_j(int n, double x);

// J_n(modulation index); |n| > drive.n_max is a truncation error.
double sideband_weight(int n, const FloquetDrive& drive);

// Superposition of per-sideband spectra: sideband n couples at rate
// g * |J_n(index)| centered at carrier + offset + n * nu1. Each sideband is a
// full model solve, so DBS bases stay flat and NHPA features appear per
// sideband. Warns when nu1 < 3x the correlation linewidth.
NoiseSpectrum multicolor_spectrum(const ThreeModeModel& base, const FloquetDrive& drive,
                                  const std::vector<QuadratureSelector>& selectors,
                                  const std::vector<double>& freq_hz);

struct BesselFit {
    double k_u = 0.0;       // recovered depth parameter, same units as nu1
    double amplitude = 0.0; // overall scale a in a * J_order(k_u / nu1)
    double residual_rms = 0.0;
};

// Least squares of a * J_order(k_u / nu1) over (a, k_u); order 0 or 1.
// Deterministic coarse-grid multistart + golden-section refinement.
BesselFit bessel_fit(const std::vector<double>& nu1_hz,
                     const std::vector<double>& amplitudes, int order);

struct CrossSidebandCoupling {
    bool resonant = false;
    double weight = 0.0;  // J_{n1}(index) * J_{n2}(index)
};

// Two spin waves dressed onto sidebands n1, n2 couple resonantly when the
// control-frequency offset delta0 matches (n1 - n2) * nu1 within linewidth_hz.
CrossSidebandCoupling cross_sideband_weight(int n1, int n2, double delta0_hz,
                                            const FloquetDrive& drive,
                                            double linewidth_hz = 100.0);

} // namespace chiraldyn
