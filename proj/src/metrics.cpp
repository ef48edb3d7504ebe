#include "chiraldyn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "chiraldyn/errors.hpp"

namespace chiraldyn {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << name << " must be > 0, got " << v;
        throw std::invalid_argument(msg.str());
    }
}

// Guard tiny negative round-off under square roots.
double safe_sqrt(double x) {
    if (x < 0.0 && x > -1e-9) x = 0.0;
    if (x < 0.0) throw NumericFailure("negative radicand in discord evaluation");
    return std::sqrt(x);
}

double clamp_nu(double x) { return x < 1.0 ? 1.0 : x; }

} // namespace

double quantum_correlation_Q(const JointVariances& jv) {
    for (double v : {jv.var_x1, jv.var_p1, jv.var_x2, jv.var_p2, jv.var_xminus, jv.var_pplus})
        require_positive(v, "quantum_correlation_Q: variance");
    const double a = jv.var_xminus + jv.var_pplus;
    const double b = (jv.var_x1 + jv.var_x2) / 2.0 + (jv.var_p1 + jv.var_p2) / 2.0;
    return b - a;
}

JointVariances joint_variances_from_cov(const Matrix& cov) {
    if (cov.rows() != 4 || cov.cols() != 4)
        throw std::invalid_argument("joint_variances_from_cov: expected 4x4 covariance");
    if (!is_physical(cov))
        throw std::invalid_argument("joint_variances_from_cov: covariance is not physical");
    JointVariances jv;
    jv.var_x1 = cov(0, 0);
    jv.var_p1 = cov(1, 1);
    jv.var_x2 = cov(2, 2);
    jv.var_p2 = cov(3, 3);
    jv.var_xminus = (cov(0, 0) + cov(2, 2) - 2.0 * cov(0, 2)) / 2.0;
    jv.var_xplus = (cov(0, 0) + cov(2, 2) + 2.0 * cov(0, 2)) / 2.0;
    jv.var_pminus = (cov(1, 1) + cov(3, 3) - 2.0 * cov(1, 3)) / 2.0;
    jv.var_pplus = (cov(1, 1) + cov(3, 3) + 2.0 * cov(1, 3)) / 2.0;
    return jv;
}

ReconstructedCov covariance_from_homodyne(double varXA, double varXB, double varXsum,
                                          double varPA, double varPB, double varPdiff) {
    for (double v : {varXA, varXB, varXsum, varPA, varPB, varPdiff})
        require_positive(v, "covariance_from_homodyne: variance");
    ReconstructedCov rc;
    rc.covXX = (varXsum - varXA - varXB) / 2.0;
    rc.covPP = -(varPdiff - varPA - varPB) / 2.0;
    const double tol = 1e-9;
    if (rc.covXX * rc.covXX > varXA * varXB * (1.0 + tol) ||
        rc.covPP * rc.covPP > varPA * varPB * (1.0 + tol)) {
        std::ostringstream msg;
        msg << "covariance_from_homodyne: implied correlations violate Cauchy-Schwarz "
            << "(covXX = " << rc.covXX << ", covPP = " << rc.covPP << ")";
        throw DataInconsistency(msg.str());
    }
    return rc;
}

std::pair<double, double> quadratures_from_stokes(double sx, double sy, double sz,
                                                  int channel) {
    if (channel != 1 && channel != 2)
        throw std::invalid_argument("quadratures_from_stokes: channel must be 1 or 2");
    if (sz == 0.0)
        throw std::invalid_argument(
            "quadratures_from_stokes: Sz = 0 leaves no local oscillator to measure against");
    const double root = std::sqrt(std::abs(sz));
    const double sign = (channel == 1) ? 1.0 : -1.0;
    return {-sx / root, -sign * sy / root};
}

double entropy_h(double x) {
    if (x < 1.0 - 1e-9)
        throw std::invalid_argument("entropy_h: argument below 1");
    if (x < 1.0) x = 1.0;
    if (x == 1.0) return 0.0;
    const double up = (x + 1.0) / 2.0;
    const double dn = (x - 1.0) / 2.0;
    return up * std::log2(up) - dn * std::log2(dn);
}

DiscordResult gaussian_discord(const Matrix& cov, MeasuredMode measured,
                               bool use_uncorrected_branch_a) {
    if (cov.rows() != 4 || cov.cols() != 4)
        throw std::invalid_argument("gaussian_discord: expected 4x4 covariance");
    if (!is_physical(cov))
        throw std::invalid_argument("gaussian_discord: covariance is not physical");

    // Measuring mode A is the same computation with the two modes swapped.
    Matrix sigma = cov;
    if (measured == MeasuredMode::A) {
        Matrix swap = Matrix::Zero(4, 4);
        swap(0, 2) = swap(1, 3) = swap(2, 0) = swap(3, 1) = 1.0;
        sigma = (swap * cov * swap.transpose()).eval();
    }

    const DetInvariants inv = det_invariants(sigma);
    const double i1 = inv.i1, i2 = inv.i2, i3 = inv.i3, i4 = inv.i4;

    const double delta = i1 + i2 + 2.0 * i3;
    const double root = safe_sqrt(delta * delta - 4.0 * i4);
    const double nu_plus = clamp_nu(safe_sqrt((delta + root) / 2.0));
    const double nu_minus = clamp_nu(safe_sqrt(std::max(0.0, (delta - root) / 2.0)));

    DiscordResult res;
    res.nu_minus = nu_minus;
    res.nu_plus = nu_plus;

    double emin;
    // Condition for the first closed-form branch of the measurement minimum.
    const double lhs = (i4 - i1 * i2) * (i4 - i1 * i2);
    const double rhs = (1.0 + i2) * i3 * i3 * (i1 + i4);
    if (lhs <= rhs) {
        res.branch = DiscordBranch::A;
        const double denom = i2 - 1.0;
        if (std::abs(denom) < 1e-12) {
            // I2 -> 1 limit: the measured mode is pure, the conditional state
            // determinant collapses to I1.
            emin = i1;
        } else {
            const double cross =
                use_uncorrected_branch_a ? (i2 - 1.0) * (i4 - 1.0) : (i2 - 1.0) * (i4 - i1);
            const double num = 2.0 * i3 * i3 + cross +
                               2.0 * std::abs(i3) * safe_sqrt(i3 * i3 + cross);
            emin = num / (denom * denom);
        }
    } else {
        res.branch = DiscordBranch::B;
        const double t = i1 * i2 + i4 - i3 * i3;
        emin = (t - safe_sqrt(t * t - 4.0 * i1 * i2 * i4)) / (2.0 * i2);
    }
    if (!std::isfinite(emin))
        throw NumericFailure("gaussian_discord: conditional determinant is not finite");
    res.e_min = emin < 1.0 ? 1.0 : emin;

    const double d = entropy_h(safe_sqrt(std::max(i2, 1.0))) - entropy_h(nu_minus) -
                     entropy_h(nu_plus) + entropy_h(safe_sqrt(res.e_min));
    // entropy_h has a steep slope near nu = 1, so roundoff in the symplectic
    // eigenvalues shows up at the 1e-8 scale for states of exactly zero discord
    res.discord = (d < 0.0 && d > -1e-6) ? 0.0 : d;
    return res;
}

std::string metrics_to_json(double q, const DiscordResult& d) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"Q\":%.12g,\"discord_bits\":%.12g,\"branch\":\"%s\","
                  "\"nu\":[%.12g,%.12g]}",
                  q, d.discord, to_string(d.branch), d.nu_minus, d.nu_plus);
    return buf;
}

const char* to_string(DiscordBranch branch) {
    return branch == DiscordBranch::A ? "A" : "B";
}

} // namespace chiraldyn
