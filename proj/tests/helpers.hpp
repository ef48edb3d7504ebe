#pragma once
// Shared fixtures: analytic covariance constructors and random physical
// two-mode states built from explicit symplectic transformations.
#include <cmath>
#include <random>

#include "chiraldyn/gaussian.hpp"

namespace chiraldyn::testing {

inline Eigen::Matrix2d rot2(double theta) {
    Eigen::Matrix2d r;
    r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return r;
}

// Two-mode squeezed vacuum with squeezing parameter r:
// [[cosh(2r) I, sinh(2r) Z], [sinh(2r) Z, cosh(2r) I]], Z = diag(1, -1).
inline Matrix tmsv_cov(double r) {
    const double c = std::cosh(2.0 * r);
    const double s = std::sinh(2.0 * r);
    Matrix cov = Matrix::Zero(4, 4);
    cov(0, 0) = cov(1, 1) = cov(2, 2) = cov(3, 3) = c;
    cov(0, 2) = cov(2, 0) = s;
    cov(1, 3) = cov(3, 1) = -s;
    return cov;
}

// Single-mode symplectic: rotation * squeeze * rotation.
inline Eigen::Matrix2d local_symplectic(std::mt19937_64& rng, double max_squeeze = 1.0) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> squeeze(-max_squeeze, max_squeeze);
    const double s = squeeze(rng);
    Eigen::Matrix2d sq = Eigen::Matrix2d::Zero();
    sq(0, 0) = std::exp(s);
    sq(1, 1) = std::exp(-s);
    return rot2(angle(rng)) * sq * rot2(angle(rng));
}

// Direct sum of two independent local symplectics.
inline Matrix random_local4(std::mt19937_64& rng, double max_squeeze = 1.0) {
    Matrix s = Matrix::Zero(4, 4);
    s.block<2, 2>(0, 0) = local_symplectic(rng, max_squeeze);
    s.block<2, 2>(2, 2) = local_symplectic(rng, max_squeeze);
    return s;
}

// Random physical two-mode covariance: thermal diag(nu1, nu1, nu2, nu2) with
// nu >= 1, conjugated by locals and a beamsplitter (all symplectic), so the
// symplectic spectrum {nu1, nu2} is exact by construction.
inline Matrix random_physical_cov(std::mt19937_64& rng, double max_squeeze = 0.8,
                                  double max_thermal = 2.0) {
    std::uniform_real_distribution<double> nu(1.0, max_thermal);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    Matrix thermal = Matrix::Zero(4, 4);
    const double nu1 = nu(rng);
    const double nu2 = nu(rng);
    thermal.diagonal() << nu1, nu1, nu2, nu2;

    const double t = angle(rng);
    Matrix bs = Matrix::Zero(4, 4);
    bs.block<2, 2>(0, 0) = std::cos(t) * Eigen::Matrix2d::Identity();
    bs.block<2, 2>(0, 2) = std::sin(t) * Eigen::Matrix2d::Identity();
    bs.block<2, 2>(2, 0) = -std::sin(t) * Eigen::Matrix2d::Identity();
    bs.block<2, 2>(2, 2) = std::cos(t) * Eigen::Matrix2d::Identity();

    const Matrix s = random_local4(rng, max_squeeze) * bs * random_local4(rng, max_squeeze);
    Matrix cov = s * thermal * s.transpose();
    return 0.5 * (cov + cov.transpose());
}

} // namespace chiraldyn::testing
