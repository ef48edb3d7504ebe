#include "chiraldyn/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "chiraldyn/errors.hpp"

namespace chiraldyn {

namespace {

double max_abs_eig(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double max_real_eig(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

} // namespace

ThreeModeModel build_model(CouplingKind kind, const ModelParams& p) {
    if (p.g1 < 0.0 || p.g2 < 0.0)
        throw std::invalid_argument("build_model: coupling rates must be >= 0");
    if (p.gamma_spin <= 0.0)
        throw std::invalid_argument("build_model: gamma_spin must be > 0");
    if (p.kappa1 <= 0.0 || p.kappa2 <= 0.0)
        throw std::invalid_argument("build_model: kappa1 and kappa2 must be > 0");
    if (p.carrier_hz < 0.0)
        throw std::invalid_argument("build_model: carrier_hz must be >= 0");
    if (kind == CouplingKind::NHPA) {
        const double ratio =
            4.0 * p.g1 * p.g2 / (p.gamma_spin * std::sqrt(p.kappa1 * p.kappa2));
        if (ratio >= 1.0) {
            std::ostringstream msg;
            msg << "build_model: amplifier above threshold, 4 g1 g2 / (gamma sqrt(k1 k2)) = "
                << ratio << " >= 1";
            throw std::invalid_argument(msg.str());
        }
    }
    ThreeModeModel m;
    m.kind = kind;
    m.g1 = p.g1;
    m.g2 = p.g2;
    m.gamma_spin = p.gamma_spin;
    m.kappa1 = p.kappa1;
    m.kappa2 = p.kappa2;
    m.delta_spin = p.delta_spin;
    m.carrier_hz = p.carrier_hz;
    return m;
}

DriftDiffusion drift_diffusion(const ThreeModeModel& m) {
    Matrix a = Matrix::Zero(6, 6);
    a.diagonal() << -m.kappa1 / 2, -m.kappa1 / 2, -m.kappa2 / 2, -m.kappa2 / 2,
        -m.gamma_spin / 2, -m.gamma_spin / 2;
    a(4, 5) += m.delta_spin;
    a(5, 4) -= m.delta_spin;

    // Channel 1 always exchanges excitations with the spin (beamsplitter form).
    a(0, 5) += m.g1;
    a(1, 4) -= m.g1;
    a(4, 1) += m.g1;
    a(5, 0) -= m.g1;

    if (m.kind == CouplingKind::DBS) {
        a(2, 5) += m.g2;
        a(3, 4) -= m.g2;
        a(4, 3) += m.g2;
        a(5, 2) -= m.g2;
    } else {
        // Channel 2 pairs with the spin as a two-mode squeezer; the symmetric
        // sign pattern is what lets X1-X2 and P1+P2 decouple into a quiet pair.
        a(2, 5) += m.g2;
        a(3, 4) += m.g2;
        a(4, 3) += m.g2;
        a(5, 2) += m.g2;
    }

    DriftDiffusion dd;
    dd.A = a;
    dd.B = Matrix::Zero(6, 6);
    dd.B.diagonal() << std::sqrt(m.kappa1), std::sqrt(m.kappa1), std::sqrt(m.kappa2),
        std::sqrt(m.kappa2), std::sqrt(m.gamma_spin), std::sqrt(m.gamma_spin);
    dd.D = dd.B * dd.B.transpose();
    dd.C = Matrix::Zero(4, 6);
    dd.C(0, 0) = std::sqrt(m.kappa1);
    dd.C(1, 1) = std::sqrt(m.kappa1);
    dd.C(2, 2) = std::sqrt(m.kappa2);
    dd.C(3, 3) = std::sqrt(m.kappa2);
    dd.E = Matrix::Zero(4, 6);
    dd.E.block<4, 4>(0, 0) = Matrix::Identity(4, 4);
    dd.carrier_hz = m.carrier_hz;
    dd.stable = max_real_eig(a) < 0.0;
    return dd;
}

Matrix steady_state_cov(const DriftDiffusion& dd) {
    const Eigen::Index n = dd.A.rows();
    if (dd.A.cols() != n || dd.D.rows() != n || dd.D.cols() != n)
        throw std::invalid_argument("steady_state_cov: A and D must be square and matched");
    if (!dd.stable || max_real_eig(dd.A) >= 0.0)
        throw NoSteadyState("steady_state_cov: drift matrix has non-decaying eigenvalues");

    // Vectorized Lyapunov solve: (I (x) A + A (x) I) vec(sigma) = -vec(D).
    // Systems here are tiny (n <= 8 quadratures), so dense LU is the robust choice.
    const Eigen::Index nn = n * n;
    Matrix k = Matrix::Zero(nn, nn);
    for (Eigen::Index i = 0; i < n; ++i)  // kron(I, A): block-diagonal copies of A
        k.block(i * n, i * n, n, n) += dd.A;
    for (Eigen::Index bi = 0; bi < n; ++bi)
        for (Eigen::Index bj = 0; bj < n; ++bj)
            k.block(bi * n, bj * n, n, n) += dd.A(bi, bj) * Matrix::Identity(n, n);
    Vector rhs(nn);
    for (Eigen::Index col = 0; col < n; ++col) rhs.segment(col * n, n) = -dd.D.col(col);

    Eigen::PartialPivLU<Matrix> lu(k);
    Vector x = lu.solve(rhs);
    Matrix sigma(n, n);
    for (Eigen::Index col = 0; col < n; ++col) sigma.col(col) = x.segment(col * n, n);
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();

    const double dnorm = dd.D.norm();
    const double residual = (dd.A * sigma + sigma * dd.A.transpose() + dd.D).norm();
    if (!sigma.allFinite() || residual > 1e-10 * std::max(dnorm, 1e-300)) {
        Eigen::JacobiSVD<Matrix> svd(k);
        const double cond =
            svd.singularValues()(0) / std::max(svd.singularValues().tail(1)(0), 1e-300);
        std::ostringstream msg;
        msg << "steady_state_cov: residual " << residual << " exceeds 1e-10*||D||, "
            << "condition estimate " << cond;
        throw NumericFailure(msg.str());
    }
    return sigma;
}

Matrix evolve_cov(const Matrix& cov0, const DriftDiffusion& dd, double t, double dt) {
    const Eigen::Index n = dd.A.rows();
    if (cov0.rows() != n || cov0.cols() != n)
        throw std::invalid_argument("evolve_cov: cov0 dimension mismatch");
    if (t < 0.0) throw std::invalid_argument("evolve_cov: t must be >= 0");
    if (dt <= 0.0) throw std::invalid_argument("evolve_cov: dt must be > 0");
    const double speed = max_abs_eig(dd.A);
    if (speed > 0.0 && dt > 0.1 / speed) {
        std::ostringstream msg;
        msg << "evolve_cov: dt " << dt << " too coarse for max|eig A| = " << speed
            << "; need dt <= " << 0.1 / speed;
        throw std::invalid_argument(msg.str());
    }
    if (t == 0.0) return cov0;

    const auto deriv = [&](const Matrix& s) -> Matrix {
        return dd.A * s + s * dd.A.transpose() + dd.D;
    };
    Matrix sigma = cov0;
    const long long steps = static_cast<long long>(std::ceil(t / dt));
    const double h = t / static_cast<double>(steps);
    for (long long i = 0; i < steps; ++i) {
        const Matrix k1 = deriv(sigma);
        const Matrix k2 = deriv(sigma + (h / 2) * k1);
        const Matrix k3 = deriv(sigma + (h / 2) * k2);
        const Matrix k4 = deriv(sigma + h * k3);
        sigma += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    if (!sigma.allFinite()) throw NumericFailure("evolve_cov: integration diverged");
    return ((sigma + sigma.transpose()) / 2.0).eval();
}

EffectiveTwoMode adiabatic_eliminate(const ThreeModeModel& m) {
    const DriftDiffusion full = drift_diffusion(m);
    const Matrix a_cc = full.A.block<4, 4>(0, 0);
    const Matrix a_cb = full.A.block<4, 2>(0, 4);
    const Matrix a_bc = full.A.block<2, 4>(4, 0);
    const Matrix a_bb = full.A.block<2, 2>(4, 4);

    // Freeze the fast spin: 0 = a_bc R_c + a_bb R_b + sqrt(gamma) xi_b, so the
    // spin tracks R_b = -a_bb^{-1} (a_bc R_c + sqrt(gamma) xi_b) and both the
    // drift and the spin-bath noise fold into the optical modes.
    const Matrix neg_abb_inv = (-a_bb).inverse();
    const Matrix a_eff = a_cc + a_cb * neg_abb_inv * a_bc;

    EffectiveTwoMode out;
    out.dd.A = a_eff;
    out.dd.B = Matrix::Zero(4, 6);
    out.dd.B.block<4, 2>(0, 0) = a_cb * neg_abb_inv * std::sqrt(m.gamma_spin);
    out.dd.B(0, 2) = std::sqrt(m.kappa1);
    out.dd.B(1, 3) = std::sqrt(m.kappa1);
    out.dd.B(2, 4) = std::sqrt(m.kappa2);
    out.dd.B(3, 5) = std::sqrt(m.kappa2);
    out.dd.D = out.dd.B * out.dd.B.transpose();
    out.dd.C = Matrix::Zero(4, 4);
    out.dd.C(0, 0) = std::sqrt(m.kappa1);
    out.dd.C(1, 1) = std::sqrt(m.kappa1);
    out.dd.C(2, 2) = std::sqrt(m.kappa2);
    out.dd.C(3, 3) = std::sqrt(m.kappa2);
    out.dd.E = Matrix::Zero(4, 6);
    out.dd.E.block<4, 4>(0, 2) = Matrix::Identity(4, 4);
    out.dd.carrier_hz = m.carrier_hz;
    out.dd.stable = max_real_eig(a_eff) < 0.0;

    out.jump.kind = m.kind;
    out.jump.gamma_c = 4.0 * m.g1 * m.g2 / m.gamma_spin;
    out.jump.gamma_1 = 4.0 * m.g1 * m.g1 / m.gamma_spin;
    out.jump.gamma_2 = 4.0 * m.g2 * m.g2 / m.gamma_spin;
    out.jump.phi = 0.0;

    const double fast = std::max(std::max(m.g1, m.g2), std::max(m.kappa1, m.kappa2));
    if (m.gamma_spin < 10.0 * fast) {
        out.regime_warning = true;
        std::ostringstream msg;
        msg << "adiabatic_eliminate: gamma_spin = " << m.gamma_spin
            << " is not >= 10x the fastest retained rate " << fast
            << "; effective model accuracy degrades";
        out.warning = msg.str();
    }
    return out;
}

} // namespace chiraldyn
