#pragma once
// Classical Doppler baseline: Lambda-system susceptibility, Maxwell-Boltzmann
// velocity averaging with co/counter-propagating control, transmission spectra
// and a contrast summary.
#include <complex>
#include <vector>

namespace chiraldyn {

struct EitParams {
    double rabi_c = 0.0;     // control Rabi frequency, rad/s, > 0
    double gamma12 = 0.0;    // ground-state decoherence, rad/s, > 0
    double gamma3 = 0.0;     // excited-state decay, rad/s, > 0
    double delta_c = 0.0;    // control detuning, rad/s
    double k = 0.0;          // wavenumber, rad/m, > 0
    double u_thermal = 0.0;  // 1-D thermal velocity scale, m/s, > 0
    double od = 0.0;         // optical depth, >= 0

    EitParams() = default;
    EitParams(double rabi_c, double gamma12, double gamma3, double delta_c, double k,
              double u_thermal, double od);
};

// Defaults chosen for the desk-scale regime: 795 nm wavenumber, u = 160 m/s,
// MHz-scale control, Hz-scale ground decoherence.
EitParams default_eit_params();

enum class Geometry { CoPropagating, CounterPropagating };

// Weak-probe Lambda susceptibility at probe detuning delta_p (rad/s) for an
// atom moving with velocity v. One-photon detuning is Doppler-shifted by k v;
// the two-photon detuning picks up 2 k v only in the counter-propagating
// geometry. Normalized so bare resonant absorption (rabi_c = 0, v = 0) is 1.
std::complex<double> lambda_chi(double delta_p, double v, Geometry geom,
                                const EitParams& p);

struct AveragedChi {
    std::complex<double> chi{0.0, 0.0};
    bool converged = false;   // doubling the node count moved the result <= 1e-6
    double refinement = 0.0;  // relative change observed on doubling
};

// Gauss-Hermite average of lambda_chi over the 1-D Maxwell distribution with
// scale u_thermal; n_points >= 32.
AveragedChi doppler_averaged_chi(double delta_p, Geometry geom, const EitParams& p,
                                 int n_points = 64);

// T(delta) = exp(-od * Im chi_bar(delta)) over a monotone detuning grid (rad/s).
std::vector<double> transmission(const std::vector<double>& delta_grid, Geometry geom,
                                 const EitParams& p, int n_points = 64);
std::vector<double> transmission_serial(const std::vector<double>& delta_grid,
                                        Geometry geom, const EitParams& p,
                                        int n_points = 64);

struct IndexWindow {
    int lo = 0;  // inclusive
    int hi = 0;  // exclusive
};

// (T_peak - T_baseline) / T_baseline, floored at 0; baseline is the mean of T
// over the window, peak is the global maximum.
double eit_contrast(const std::vector<double>& t, IndexWindow baseline_window);

} // namespace chiraldyn
