#include <doctest.h>

#include <cmath>
#include <random>

#include "chiraldyn/errors.hpp"
#include "chiraldyn/metrics.hpp"
#include "helpers.hpp"

using namespace chiraldyn;
using namespace chiraldyn::testing;

TEST_CASE("independent vacua give exactly zero Q") {
    JointVariances jv;  // all defaults: vacuum in both channels
    jv.var_xminus = 1.0;
    jv.var_pplus = 1.0;
    CHECK(quantum_correlation_Q(jv) == doctest::Approx(0.0));
}

TEST_CASE("Q from a covariance matches the hand-built combination") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix cov = random_physical_cov(rng);
        const JointVariances jv = joint_variances_from_cov(cov);
        const double direct =
            (jv.var_x1 + jv.var_x2) / 2.0 + (jv.var_p1 + jv.var_p2) / 2.0 -
            (jv.var_xminus + jv.var_pplus);
        CHECK(quantum_correlation_Q(jv) == doctest::Approx(direct).epsilon(1e-12));

        // joint variances are the quadratic forms of the covariance
        CHECK(jv.var_xminus ==
              doctest::Approx((cov(0, 0) + cov(2, 2)) / 2.0 - cov(0, 2)).epsilon(1e-12));
        CHECK(jv.var_pplus ==
              doctest::Approx((cov(1, 1) + cov(3, 3)) / 2.0 + cov(1, 3)).epsilon(1e-12));
    }
}

TEST_CASE("Q of the two-mode squeezed vacuum grows as 2 sinh(2r)") {
    for (double r : {0.1, 0.4, 0.9}) {
        const JointVariances jv = joint_variances_from_cov(tmsv_cov(r));
        CHECK(quantum_correlation_Q(jv) ==
              doctest::Approx(2.0 * std::sinh(2.0 * r)).epsilon(1e-10));
    }
}

TEST_CASE("homodyne covariance reconstruction round-trips") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix cov = random_physical_cov(rng);
        const double varXsum = cov(0, 0) + cov(2, 2) + 2.0 * cov(0, 2);
        const double varPdiff = cov(1, 1) + cov(3, 3) - 2.0 * cov(1, 3);
        const ReconstructedCov rc = covariance_from_homodyne(
            cov(0, 0), cov(2, 2), varXsum, cov(1, 1), cov(3, 3), varPdiff);
        CHECK(rc.covXX == doctest::Approx(cov(0, 2)).epsilon(1e-12));
        CHECK(rc.covPP == doctest::Approx(cov(1, 3)).epsilon(1e-12));
    }
}

TEST_CASE("homodyne reconstruction rejects impossible variance combinations") {
    // implied covXX = 2 > sqrt(varXA varXB) = 1 violates Cauchy-Schwarz
    CHECK_THROWS_AS(covariance_from_homodyne(1.0, 1.0, 6.0, 1.0, 1.0, 2.0),
                    DataInconsistency);
    CHECK_THROWS_AS(covariance_from_homodyne(1.0, 1.0, 2.0, 1.0, 1.0, -1.0),
                    std::invalid_argument);
}

TEST_CASE("polarization readout scales and signs") {
    const auto [x1, p1] = quadratures_from_stokes(0.3, -0.2, 4.0, 1);
    CHECK(x1 == doctest::Approx(-0.3 / 2.0).epsilon(1e-12));
    CHECK(p1 == doctest::Approx(0.2 / 2.0).epsilon(1e-12));
    // channel 2 flips the P sign (opposite circular basis)
    const auto [x2, p2] = quadratures_from_stokes(0.3, -0.2, -4.0, 2);
    CHECK(x2 == doctest::Approx(-0.3 / 2.0).epsilon(1e-12));
    CHECK(p2 == doctest::Approx(-0.2 / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(quadratures_from_stokes(0.0, 0.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(quadratures_from_stokes(0.1, 0.1, 1.0, 3), std::invalid_argument);
}

TEST_CASE("binary entropy-like function h") {
    CHECK(entropy_h(1.0) == doctest::Approx(0.0));
    CHECK(entropy_h(3.0) == doctest::Approx(2.0).epsilon(1e-12));  // 2 log2 2 - 1 log2 1
    CHECK(entropy_h(1.0 - 1e-10) == doctest::Approx(0.0));
    CHECK_THROWS_AS(entropy_h(0.5), std::invalid_argument);

    double prev = entropy_h(1.0);
    for (int i = 1; i <= 1000; ++i) {
        const double x = 1.0 + 0.01 * i;
        const double h = entropy_h(x);
        CHECK(h >= prev);
        prev = h;
    }
}

TEST_CASE("both printed forms of the branch-B radicand agree") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix cov = random_physical_cov(rng);
        const DetInvariants inv = det_invariants(cov);
        const double t = inv.i1 * inv.i2 + inv.i4 - inv.i3 * inv.i3;
        const double direct = t * t - 4.0 * inv.i1 * inv.i2 * inv.i4;
        // the same polynomial, arranged the way it is usually quoted
        const double expanded = std::pow(inv.i3, 4) +
                                std::pow(inv.i4 - inv.i1 * inv.i2, 2) -
                                2.0 * inv.i3 * inv.i3 * (inv.i4 + inv.i1 * inv.i2);
        const double scale = std::max({1.0, std::abs(direct), std::abs(expanded)});
        CHECK(std::abs(direct - expanded) / scale < 1e-10);
    }
}

TEST_CASE("discord of a product state vanishes") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_real_distribution<double> nu(1.0, 3.0);
        Matrix cov = Matrix::Zero(4, 4);
        const double n1 = nu(rng);
        const double n2 = nu(rng);
        cov.diagonal() << n1, n1, n2, n2;
        const Matrix local = random_local4(rng);
        Matrix moved = local * cov * local.transpose();
        moved = 0.5 * (moved + moved.transpose());
        const DiscordResult d = gaussian_discord(moved);
        CHECK(d.discord <= 1e-10);
        CHECK(d.discord >= 0.0);
    }
}

TEST_CASE("discord of the two-mode squeezed vacuum at r = 0.5") {
    const DiscordResult d = gaussian_discord(tmsv_cov(0.5));
    CHECK(d.discord == doctest::Approx(0.95138951).epsilon(2e-6));
    CHECK(d.nu_minus == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("measuring mode A equals measuring mode B on a swapped state") {
    std::mt19937_64 rng(41);
    Matrix perm = Matrix::Zero(4, 4);
    perm(0, 2) = perm(1, 3) = perm(2, 0) = perm(3, 1) = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix cov = random_physical_cov(rng);
        const Matrix swapped = perm * cov * perm.transpose();
        const DiscordResult a = gaussian_discord(cov, MeasuredMode::A);
        const DiscordResult b = gaussian_discord(swapped, MeasuredMode::B);
        CHECK(a.discord == doctest::Approx(b.discord).epsilon(1e-9));
    }
}

TEST_CASE("metrics JSON carries Q, discord, branch, and symplectic pair") {
    const DiscordResult d = gaussian_discord(tmsv_cov(0.3));
    const std::string js = metrics_to_json(0.5, d);
    CHECK(js.find("\"Q\":") != std::string::npos);
    CHECK(js.find("\"discord_bits\":") != std::string::npos);
    CHECK(js.find("\"branch\":") != std::string::npos);
    CHECK(js.find("\"nu\":[") != std::string::npos);
}
