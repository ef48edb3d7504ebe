#pragma once
// Three-mode quantum Langevin model {a1, a2, spin b}: drift/diffusion assembly,
// Lyapunov steady states, an RK4 oracle integrator, adiabatic elimination of
// the spin, and homodyne output noise spectra (analytic and stochastic).
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chiraldyn/chirality.hpp"
#include "chiraldyn/gaussian.hpp"

namespace chiraldyn {

struct ThreeModeModel {
    CouplingKind kind = CouplingKind::DBS;
    double g1 = 0.0;          // light-spin coupling, channel 1 (rad/s)
    double g2 = 0.0;          // light-spin coupling, channel 2 (rad/s)
    double gamma_spin = 0.0;  // total spin decoherence (rad/s), > 0
    double kappa1 = 0.0;      // optical bandwidth, channel 1 (rad/s), > 0
    double kappa2 = 0.0;      // optical bandwidth, channel 2 (rad/s), > 0
    double delta_spin = 0.0;  // spin detuning from two-photon resonance (rad/s)
    double carrier_hz = 0.0;  // detection carrier (twice the Larmor frequency), Hz
};

struct ModelParams {
    double g1 = 0.0;
    double g2 = 0.0;
    double gamma_spin = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double delta_spin = 0.0;
    double carrier_hz = 0.0;
};

// Validates rates and, for NHPA, the below-threshold condition
// 4 g1 g2 / (gamma_spin * sqrt(kappa1 kappa2)) < 1.
ThreeModeModel build_model(CouplingKind kind, const ModelParams& params);

// Quadrature-space Langevin model dR = A R dt + B dW with output rows
// R_out = C R - E R_in. D = B B^T is the diffusion matrix. Quadrature
// ordering (X1, P1, X2, P2[, Xb, Pb]); noise columns follow the same order.
struct DriftDiffusion {
    Matrix A;            // 2N x 2N drift (rad/s)
    Matrix D;            // 2N x 2N diffusion, symmetric PSD
    Matrix B;            // 2N x M noise input, D = B B^T
    Matrix C;            // 4 x 2N monitored-output rows (sqrt(kappa_i) weights)
    Matrix E;            // 4 x M input feedthrough into the monitored outputs
    double carrier_hz = 0.0;
    bool stable = false;  // all eigenvalues of A strictly in the left half-plane
};

DriftDiffusion drift_diffusion(const ThreeModeModel& model);

// Unique solution of A sigma + sigma A^T + D = 0.
// Residual guaranteed <= 1e-10 * ||D||_F, else NumericFailure; unstable A
// raises NoSteadyState.
Matrix steady_state_cov(const DriftDiffusion& dd);

// Fixed-step RK4 for d sigma/dt = A sigma + sigma A^T + D from cov0 to time t.
// Refuses dt > 0.1 / max|eig A|.
Matrix evolve_cov(const Matrix& cov0, const DriftDiffusion& dd, double t, double dt);

// Collective jump operator of the reduced two-mode dynamics:
// DBS  L ~ sqrt(gamma_c) (a1 + e^{i phi} a2)
// NHPA L ~ sqrt(gamma_c) (a1 + e^{i phi} a2^dagger), phi = 0 by convention.
struct JumpDescriptor {
    CouplingKind kind = CouplingKind::DBS;
    double gamma_c = 0.0;  // 4 g1 g2 / gamma_spin
    double gamma_1 = 0.0;  // 4 g1^2 / gamma_spin
    double gamma_2 = 0.0;  // 4 g2^2 / gamma_spin
    double phi = 0.0;
};

struct EffectiveTwoMode {
    DriftDiffusion dd;  // 4x4 effective model with spin-bath noise columns kept
    JumpDescriptor jump;
    bool regime_warning = false;  // set when gamma_spin < 10 * max(g1, g2, kappa1, kappa2)
    std::string warning;
};

// Eliminates the spin mode at rate gamma_spin, keeping the input-output
// structure (spin-bath noise reaches the optical modes through the eliminated
// mode, so output spectra remain faithful).
EffectiveTwoMode adiabatic_eliminate(const ThreeModeModel& model);

// Homodyne quadrature combination of the two monitored optical outputs,
// expressed as weights over (X1, P1, X2, P2).
struct QuadratureSelector {
    std::string label;
    Eigen::Vector4d weights = Eigen::Vector4d::Zero();
};

// Named selectors: x1, p1, x2, p2, and the +-/sqrt(2) joint combinations
// xminus, xplus, pminus, pplus. Unknown label -> std::invalid_argument.
QuadratureSelector selector_from_label(const std::string& label);
std::vector<QuadratureSelector> standard_selectors();

struct NoiseSpectrum {
    std::vector<double> freq_hz;  // monotone grid, absolute frequency
    std::map<std::string, std::vector<double>> series;  // label -> shot-normalized power
    std::map<std::string, std::vector<double>> stderr_est;  // only for stochastic estimates
    double bandwidth_hz = 0.0;  // analysis bandwidth attached by the producer
    std::string warning;        // non-fatal caveats (coarse grid, short duration)
};

// Symmetrized output spectrum via T(w) = C M(w) B - E, M(w) = (i w' I - A)^{-1},
// w' = 2 pi (f - carrier); series value = s^T Re[T T^dagger] s. Far-detuned
// limit is exactly 1. bandwidth_hz is recorded on the result and used to warn
// when the grid is too coarse to resolve features of that width.
NoiseSpectrum output_noise_spectrum(const DriftDiffusion& dd,
                                    const std::vector<QuadratureSelector>& selectors,
                                    const std::vector<double>& freq_hz,
                                    double bandwidth_hz);
// Single-threaded reference implementation (identical arithmetic per bin).
NoiseSpectrum output_noise_spectrum_serial(const DriftDiffusion& dd,
                                           const std::vector<QuadratureSelector>& selectors,
                                           const std::vector<double>& freq_hz,
                                           double bandwidth_hz);

// Euler-Maruyama trajectory + Welch periodogram estimate of the same output
// spectrum; the independent oracle for output_noise_spectrum. Deterministic
// given seed. Frequencies are returned as carrier + baseband offsets over
// (-1/2dt, 1/2dt]; stderr_est holds per-bin standard errors. nfft selects the
// Hann segment length (power of two; 0 -> automatic from the sample count).
NoiseSpectrum stochastic_trajectory_spectrum(const DriftDiffusion& dd,
                                             const QuadratureSelector& selector,
                                             double duration, double dt,
                                             std::uint64_t seed, int nfft = 0);

std::string spectrum_to_csv(const NoiseSpectrum& spectrum);

} // namespace chiraldyn
