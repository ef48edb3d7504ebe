#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chiraldyn/dynamics.hpp"
#include "chiraldyn/errors.hpp"

using namespace chiraldyn;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ThreeModeModel make_model(CouplingKind kind, double gain, double g_ratio = 1.0) {
    ModelParams p;
    p.gamma_spin = kTwoPi * 100.0;
    p.kappa1 = kTwoPi * 1000.0;
    p.kappa2 = kTwoPi * 1000.0;
    p.carrier_hz = 298800.0;
    const double g =
        std::sqrt(gain * p.gamma_spin * std::sqrt(p.kappa1 * p.kappa2)) / 2.0;
    p.g1 = g * g_ratio;
    p.g2 = g;
    return build_model(kind, p);
}

std::vector<double> grid_around(double center, double span, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = center - span / 2 + span * i / (n - 1);
    return g;
}

} // namespace

TEST_CASE("far-detuned output noise is exactly shot noise") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.5);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto grid = grid_around(model.carrier_hz + 5.0e7, 1000.0, 11);
    const NoiseSpectrum spec = output_noise_spectrum(dd, standard_selectors(), grid, 0.0);
    for (const auto& [label, vals] : spec.series)
        for (double v : vals) CHECK(std::abs(v - 1.0) < 1e-6);
}

TEST_CASE("passive exchange leaves every output at shot noise at all frequencies") {
    const ThreeModeModel model = make_model(CouplingKind::DBS, 0.5);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto grid = grid_around(model.carrier_hz, 4000.0, 401);
    const NoiseSpectrum spec = output_noise_spectrum(dd, standard_selectors(), grid, 0.0);
    for (const auto& [label, vals] : spec.series)
        for (double v : vals) CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("symmetric amplifier pins the quiet joint quadratures at shot noise") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.3);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto grid = grid_around(model.carrier_hz, 2000.0, 201);
    const NoiseSpectrum spec = output_noise_spectrum(dd, standard_selectors(), grid, 0.0);
    for (double v : spec.series.at("xminus")) CHECK(std::abs(v - 1.0) < 1e-10);
    for (double v : spec.series.at("pplus")) CHECK(std::abs(v - 1.0) < 1e-10);
    // while the single channels and the loud combinations sit above it
    CHECK(spec.series.at("x1")[100] > 1.5);
    CHECK(spec.series.at("xplus")[100] > 2.0);
}

TEST_CASE("carrier excess matches the closed forms") {
    // symmetric amplifier at gain x: the linear term lives in the collective
    // quadrature, S_xplus(carrier) - 1 = 16 x^2 + 8 x, while a single channel
    // only sees the quadratic piece, S_x1(carrier) - 1 = 8 x^2
    for (double x : {0.09551, 0.3}) {
        const ThreeModeModel model = make_model(CouplingKind::NHPA, x);
        const DriftDiffusion dd = drift_diffusion(model);
        const NoiseSpectrum spec = output_noise_spectrum(
            dd, {selector_from_label("x1"), selector_from_label("xplus")},
            {model.carrier_hz}, 0.0);
        CHECK(spec.series.at("x1")[0] - 1.0 ==
              doctest::Approx(8 * x * x).epsilon(1e-9));
        CHECK(spec.series.at("xplus")[0] - 1.0 ==
              doctest::Approx(16 * x * x + 8 * x).epsilon(1e-9));
    }
}

TEST_CASE("unbalanced couplings squeeze the joint difference below shot noise") {
    // g1 = 2 g2 at base gain 0.09551: the optical pair becomes EPR-correlated
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.09551, 2.0);
    const DriftDiffusion dd = drift_diffusion(model);
    const NoiseSpectrum spec = output_noise_spectrum(
        dd, {selector_from_label("xminus"), selector_from_label("pplus")},
        {model.carrier_hz}, 0.0);
    const double s_xminus = spec.series.at("xminus")[0];
    CHECK(s_xminus < 1.0);
    CHECK(s_xminus == doctest::Approx(0.725).epsilon(2e-3));
    CHECK(spec.series.at("pplus")[0] == doctest::Approx(s_xminus).epsilon(1e-9));
}

TEST_CASE("parallel and serial spectrum kernels agree bit for bit") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.45);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto grid = grid_around(model.carrier_hz, 3000.0, 1001);
    const NoiseSpectrum a = output_noise_spectrum(dd, standard_selectors(), grid, 0.0);
    const NoiseSpectrum b =
        output_noise_spectrum_serial(dd, standard_selectors(), grid, 0.0);
    for (const auto& [label, va] : a.series) {
        const auto& vb = b.series.at(label);
        for (size_t i = 0; i < va.size(); ++i) CHECK(va[i] == vb[i]);
    }
}

TEST_CASE("spectrum input validation") {
    const ThreeModeModel model = make_model(CouplingKind::DBS, 0.2);
    const DriftDiffusion dd = drift_diffusion(model);
    CHECK_THROWS_AS(output_noise_spectrum(dd, standard_selectors(), {2.0, 1.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(output_noise_spectrum(dd, {}, {1.0, 2.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(output_noise_spectrum(dd, standard_selectors(), {1.0, 2.0}, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(selector_from_label("y1"), std::invalid_argument);
}

TEST_CASE("coarse grids against a requested bandwidth only warn") {
    const ThreeModeModel model = make_model(CouplingKind::DBS, 0.2);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto coarse = grid_around(model.carrier_hz, 10000.0, 11);  // 1 kHz steps
    const NoiseSpectrum spec =
        output_noise_spectrum(dd, standard_selectors(), coarse, 100.0);
    CHECK_FALSE(spec.warning.empty());
    CHECK(spec.bandwidth_hz == doctest::Approx(100.0));
}

TEST_CASE("uncoupled cavities reflect white vacuum noise") {
    const ThreeModeModel model = make_model(CouplingKind::DBS, 0.0);
    const DriftDiffusion dd = drift_diffusion(model);
    const NoiseSpectrum sim = stochastic_trajectory_spectrum(
        dd, selector_from_label("x1"), 4.0, 6.0e-6, 42, 4096);
    const auto& vals = sim.series.at("x1");
    const auto& errs = sim.stderr_est.at("x1");
    REQUIRE(vals.size() == 4096);
    int within = 0;
    for (size_t i = 0; i < vals.size(); ++i)
        if (std::abs(vals[i] - 1.0) <= 3.0 * errs[i]) ++within;
    CHECK(within >= static_cast<int>(0.95 * vals.size()));
}

TEST_CASE("trajectory estimates are reproducible by seed") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.3);
    const DriftDiffusion dd = drift_diffusion(model);
    const NoiseSpectrum a = stochastic_trajectory_spectrum(
        dd, selector_from_label("xplus"), 2.0, 6.0e-6, 7, 2048);
    const NoiseSpectrum b = stochastic_trajectory_spectrum(
        dd, selector_from_label("xplus"), 2.0, 6.0e-6, 7, 2048);
    const NoiseSpectrum c = stochastic_trajectory_spectrum(
        dd, selector_from_label("xplus"), 2.0, 6.0e-6, 8, 2048);
    const auto& va = a.series.at("xplus");
    const auto& vb = b.series.at("xplus");
    const auto& vc = c.series.at("xplus");
    double max_ab = 0.0, max_ac = 0.0;
    for (size_t i = 0; i < va.size(); ++i) {
        max_ab = std::max(max_ab, std::abs(va[i] - vb[i]));
        max_ac = std::max(max_ac, std::abs(va[i] - vc[i]));
    }
    CHECK(max_ab == 0.0);
    CHECK(max_ac > 0.0);
}

TEST_CASE("trajectory spectrum brackets the analytic one at amplifier settings") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.3);
    const DriftDiffusion dd = drift_diffusion(model);
    const double dt = 1.0 / 131072.0;
    const NoiseSpectrum sim = stochastic_trajectory_spectrum(
        dd, selector_from_label("x1"), 6.0, dt, 11, 8192);
    const NoiseSpectrum ana =
        output_noise_spectrum(dd, {selector_from_label("x1")}, sim.freq_hz, 0.0);
    const auto& vs = sim.series.at("x1");
    const auto& es = sim.stderr_est.at("x1");
    const auto& va = ana.series.at("x1");
    int within = 0;
    for (size_t i = 0; i < vs.size(); ++i)
        if (std::abs(vs[i] - va[i]) <= 3.0 * es[i]) ++within;
    CHECK(within >= static_cast<int>(0.93 * vs.size()));
}

TEST_CASE("reduced two-mode model reproduces the full output spectrum when valid") {
    // strongly separated rates: the eliminated model must match the full one
    ModelParams p;
    p.kappa1 = p.kappa2 = kTwoPi * 1000.0;
    p.g1 = p.g2 = kTwoPi * 15000.0;
    p.gamma_spin = kTwoPi * 1.5e6;  // 100x the coupling
    p.carrier_hz = 298800.0;
    const ThreeModeModel model = build_model(CouplingKind::NHPA, p);
    const auto grid = grid_around(p.carrier_hz, 4000.0, 101);
    const NoiseSpectrum full =
        output_noise_spectrum(drift_diffusion(model), standard_selectors(), grid, 0.0);
    const EffectiveTwoMode eff = adiabatic_eliminate(model);
    const NoiseSpectrum reduced =
        output_noise_spectrum(eff.dd, standard_selectors(), grid, 0.0);
    for (const auto& [label, vf] : full.series) {
        const auto& vr = reduced.series.at(label);
        for (size_t i = 0; i < vf.size(); ++i)
            CHECK(std::abs(vf[i] - vr[i]) < 2e-3 * std::max(1.0, std::abs(vf[i])));
    }
}

TEST_CASE("stochastic step-size guard") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.3);
    const DriftDiffusion dd = drift_diffusion(model);
    CHECK_THROWS_AS(stochastic_trajectory_spectrum(dd, selector_from_label("x1"), 1.0,
                                                   1.0e-3, 1, 1024),
                    std::invalid_argument);
    CHECK_THROWS_AS(stochastic_trajectory_spectrum(dd, selector_from_label("x1"), 1.0,
                                                   6.0e-6, 1, 1000),
                    std::invalid_argument);  // nfft not a power of two
}

TEST_CASE("CSV export carries the grid and every series") {
    const ThreeModeModel model = make_model(CouplingKind::NHPA, 0.2);
    const DriftDiffusion dd = drift_diffusion(model);
    const auto grid = grid_around(model.carrier_hz, 100.0, 3);
    const NoiseSpectrum spec = output_noise_spectrum(
        dd, {selector_from_label("x1"), selector_from_label("pplus")}, grid, 0.0);
    const std::string csv = spectrum_to_csv(spec);
    CHECK(csv.rfind("freq_hz,", 0) == 0);
    CHECK(csv.find("pplus") != std::string::npos);
    CHECK(csv.find("x1") != std::string::npos);
    // one header plus one row per grid point
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
