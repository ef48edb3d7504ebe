#include "chiraldyn/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "chiraldyn/errors.hpp"

namespace chiraldyn {

namespace {

void check_finite(const Matrix& m, const char* who) {
    if (!m.allFinite())
        throw NumericFailure(std::string(who) + ": covariance contains NaN/Inf");
}

} // namespace

GaussianState::GaussianState(int n, Vector mu, Matrix sigma)
    : n_modes(n), mean(std::move(mu)), cov(std::move(sigma)) {
    if (n_modes <= 0)
        throw std::invalid_argument("GaussianState: n_modes must be positive");
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(n_modes);
    if (mean.size() != dim || cov.rows() != dim || cov.cols() != dim)
        throw std::invalid_argument("GaussianState: mean/cov dimensions do not match n_modes");
    check_finite(cov, "GaussianState");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("GaussianState: covariance asymmetry exceeds 1e-12");
    cov = ((cov + cov.transpose()) / 2.0).eval();
}

GaussianState vacuum_state(int n_modes) {
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(n_modes);
    return GaussianState(n_modes, Vector::Zero(dim), Matrix::Identity(dim, dim));
}

Matrix symplectic_form(int n_modes) {
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(n_modes);
    Matrix omega = Matrix::Zero(dim, dim);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

std::vector<double> symplectic_eigenvalues(const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0)
        throw std::invalid_argument("symplectic_eigenvalues: need even square matrix");
    check_finite(cov, "symplectic_eigenvalues");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("symplectic_eigenvalues: covariance not symmetric");
    const int n = static_cast<int>(cov.rows()) / 2;

    // Eigenvalues of Omega*sigma come in +-i*nu pairs; collect moduli and take
    // every second one after sorting so each pair contributes once.
    Eigen::EigenSolver<Matrix> solver(symplectic_form(n) * cov, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericFailure("symplectic_eigenvalues: eigen decomposition failed");
    std::vector<double> mags(2 * n);
    for (int i = 0; i < 2 * n; ++i) mags[i] = std::abs(solver.eigenvalues()[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    std::vector<double> nu(n);
    for (int i = 0; i < n; ++i) nu[i] = (mags[2 * i] + mags[2 * i + 1]) / 2.0;
    return nu;
}

bool is_physical(const Matrix& cov, double tol) {
    const auto nu = symplectic_eigenvalues(cov);
    return nu.back() >= 1.0 - tol;
}

bool is_physical(const GaussianState& state, double tol) {
    return is_physical(state.cov, tol);
}

DetInvariants det_invariants(const Matrix& cov) {
    if (cov.rows() != 4 || cov.cols() != 4)
        throw std::invalid_argument("det_invariants: expected a two-mode (4x4) covariance");
    check_finite(cov, "det_invariants");
    DetInvariants inv;
    inv.i1 = cov.block<2, 2>(0, 0).determinant();
    inv.i2 = cov.block<2, 2>(2, 2).determinant();
    inv.i3 = cov.block<2, 2>(0, 2).determinant();
    inv.i4 = cov.determinant();
    return inv;
}

GaussianState partial_trace(const GaussianState& state, const std::vector<int>& keep) {
    if (keep.empty())
        throw std::invalid_argument("partial_trace: empty mode list");
    for (int m : keep)
        if (m < 0 || m >= state.n_modes)
            throw std::invalid_argument("partial_trace: mode index out of range");
    const int n = static_cast<int>(keep.size());
    Vector mu(2 * n);
    Matrix sigma(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        mu.segment<2>(2 * a) = state.mean.segment<2>(2 * keep[a]);
        for (int b = 0; b < n; ++b)
            sigma.block<2, 2>(2 * a, 2 * b) = state.cov.block<2, 2>(2 * keep[a], 2 * keep[b]);
    }
    return GaussianState(n, mu, sigma);
}

std::string state_to_json(const GaussianState& state) {
    nlohmann::json j;
    j["n_modes"] = state.n_modes;
    j["ordering"] = "XPXP";
    j["mean"] = std::vector<double>(state.mean.data(), state.mean.data() + state.mean.size());
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < state.cov.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < state.cov.cols(); ++c) row.push_back(state.cov(r, c));
        rows.push_back(std::move(row));
    }
    j["cov"] = std::move(rows);
    return j.dump(2);
}

GaussianState state_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("state_from_json: ") + e.what());
    }
    if (!j.contains("n_modes") || !j.contains("cov"))
        throw std::invalid_argument("state_from_json: need n_modes and cov");
    if (j.value("ordering", std::string("XPXP")) != "XPXP")
        throw std::invalid_argument("state_from_json: only XPXP ordering is supported");
    const int n = j.at("n_modes").get<int>();
    if (n <= 0) throw std::invalid_argument("state_from_json: n_modes must be positive");
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(n);
    Matrix sigma(dim, dim);
    const auto& rows = j.at("cov");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim)
        throw std::invalid_argument("state_from_json: cov must be a 2n x 2n array");
    for (Eigen::Index r = 0; r < dim; ++r) {
        const auto& row = rows[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
            throw std::invalid_argument("state_from_json: cov must be a 2n x 2n array");
        for (Eigen::Index c = 0; c < dim; ++c) sigma(r, c) = row[static_cast<size_t>(c)].get<double>();
    }
    Vector mu = Vector::Zero(dim);
    if (j.contains("mean")) {
        const auto& jm = j.at("mean");
        if (static_cast<Eigen::Index>(jm.size()) != dim)
            throw std::invalid_argument("state_from_json: mean length must be 2n");
        for (Eigen::Index i = 0; i < dim; ++i) mu[i] = jm[static_cast<size_t>(i)].get<double>();
    }
    return GaussianState(n, std::move(mu), std::move(sigma));
}

} // namespace chiraldyn
