#pragma once

// Gaussian-state covariance algebra in shot-noise units: quadratures ordered
// (X1, P1, X2, P2, ...), vacuum covariance = identity, [X, P] = 2i.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace chiraldyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Zero-mean Gaussian state of n_modes bosonic modes. The covariance is
// symmetrized on construction; asymmetry beyond 1e-12 (relative to the largest
// entry) is rejected as corrupt input.
struct GaussianState {
    int n_modes = 0;
    Vector mean;
    Matrix cov;

    GaussianState() = default;
    GaussianState(int n_modes, Vector mean, Matrix cov);
};

// Vacuum of n modes: zero mean, identity covariance.
GaussianState vacuum_state(int n_modes);

// Symplectic form Omega = direct sum of [[0, 1], [-1, 0]] per mode.
Matrix symplectic_form(int n_modes);

// Symplectic spectrum of a 2n x 2n covariance: the n moduli of the eigenvalue
// pairs of i*Omega*cov, sorted descending. Physical states have all >= 1.
std::vector<double> symplectic_eigenvalues(const Matrix& cov);

// Heisenberg bound sigma + i*Omega >= 0, checked as min symplectic eigenvalue
// >= 1 - tol.
bool is_physical(const Matrix& cov, double tol = 1e-9);
bool is_physical(const GaussianState& state, double tol = 1e-9);

// Local 2x2 block determinants of a two-mode covariance
// [[alpha, gamma], [gamma^T, beta]] plus the full determinant. Invariant under
// local symplectic transformations.
struct DetInvariants {
    double i1 = 0; // det alpha
    double i2 = 0; // det beta
    double i3 = 0; // det gamma
    double i4 = 0; // det of the full 4x4
};

DetInvariants det_invariants(const Matrix& cov);

// Reduced state over the listed modes (indices into the mode list, ascending
// output order follows the argument order).
GaussianState partial_trace(const GaussianState& state, const std::vector<int>& keep);

// JSON exchange format: {"n_modes": N, "ordering": "XPXP", "mean": [...], "cov": [[...]]}.
std::string state_to_json(const GaussianState& state);
GaussianState state_from_json(const std::string& text);

} // namespace chiraldyn
