#pragma once
// Bipartite correlation metrics on two-mode Gaussian states: the Q witness
// built from homodyne variances, covariance reconstruction from sum/difference
// measurements, Stokes-to-quadrature mapping, and Gaussian quantum discord.
#include <limits>
#include <string>
#include <utility>

#include "chiraldyn/gaussian.hpp"

namespace chiraldyn {

// Shot-normalized variances of the individual and joint quadratures.
// var_xminus = Var[(X1 - X2)/sqrt(2)], var_pplus = Var[(P1 + P2)/sqrt(2)];
// the optional members default to NaN when not measured.
struct JointVariances {
    double var_x1 = 1.0;
    double var_p1 = 1.0;
    double var_x2 = 1.0;
    double var_p2 = 1.0;
    double var_xminus = 1.0;
    double var_pplus = 1.0;
    double var_xplus = std::numeric_limits<double>::quiet_NaN();
    double var_pminus = std::numeric_limits<double>::quiet_NaN();
};

// Q = B - A with A = var_xminus + var_pplus and
// B = (var_x1 + var_x2)/2 + (var_p1 + var_p2)/2. Positive Q witnesses
// bipartite correlations; independent vacua give exactly 0.
double quantum_correlation_Q(const JointVariances& jv);

JointVariances joint_variances_from_cov(const Matrix& cov);

// Reconstructs covariance entries from sum/difference homodyne variances
// (varXsum = Var(X_A + X_B), no 1/sqrt(2)):
//   covXX = [varXsum - varXA - varXB] / 2
//   covPP = -[varPdiff - varPA - varPB] / 2
// Throws DataInconsistency when the implied correlation breaks Cauchy-Schwarz.
struct ReconstructedCov {
    double covXX = 0.0;
    double covPP = 0.0;
};
ReconstructedCov covariance_from_homodyne(double varXA, double varXB, double varXsum,
                                          double varPA, double varPB, double varPdiff);

// Polarization readout: X = -Sx/sqrt|Sz|, P = -sign * Sy/sqrt|Sz| with
// sign = +1 for channel 1 and -1 for channel 2 (the two channels carry
// opposite Sz, so the sign keeps [X, P] fixed).
std::pair<double, double> quadratures_from_stokes(double sx, double sy, double sz,
                                                  int channel);

// h(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2), h(1) = 0.
// x in [1 - 1e-9, 1) is clamped to 1; smaller x is rejected.
double entropy_h(double x);

// Which mode the optimized Gaussian measurement acts on.
enum class MeasuredMode { A, B };

// The closed-form conditional-entropy minimum has two cases; the result
// records which one applied so downstream consumers can audit the path.
enum class DiscordBranch { A, B };

struct DiscordResult {
    double discord = 0.0;  // base-2 (bits), clamped at 0 for |neg| <= 1e-10
    double nu_minus = 1.0;
    double nu_plus = 1.0;
    double e_min = 1.0;
    DiscordBranch branch = DiscordBranch::A;
};

// Gaussian quantum discord of a two-mode covariance (XPXP, shot-noise units),
// measurement on `measured` (default mode B). use_uncorrected_branch_a keeps a
// diagnostic variant of the branch-A formula whose product-state value is
// nonzero; it exists only for comparison and is never the default.
DiscordResult gaussian_discord(const Matrix& cov, MeasuredMode measured = MeasuredMode::B,
                               bool use_uncorrected_branch_a = false);

// {"Q": ..., "discord_bits": ..., "branch": "A"|"B", "nu": [nu_minus, nu_plus]}
std::string metrics_to_json(double q, const DiscordResult& d);

const char* to_string(DiscordBranch branch);

} // namespace chiraldyn
