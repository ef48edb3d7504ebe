#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "chiraldyn/eit.hpp"
#include "chiraldyn/errors.hpp"

using namespace chiraldyn;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> detuning_grid(double span_hz, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = kTwoPi * (-span_hz / 2.0 + span_hz * i / (n - 1));
    return g;
}

} // namespace

TEST_CASE("without control the stationary line is a bare Lorentzian") {
    EitParams p = default_eit_params();
    EitParams bare(1e-30, p.gamma12, p.gamma3, 0.0, p.k, p.u_thermal, p.od);
    const double hwhm = bare.gamma3 / 2.0;
    const auto chi0 = lambda_chi(0.0, 0.0, Geometry::CoPropagating, bare);
    CHECK(chi0.imag() == doctest::Approx(1.0).epsilon(1e-6));
    const auto chi_h = lambda_chi(hwhm, 0.0, Geometry::CoPropagating, bare);
    CHECK(chi_h.imag() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("control field opens a transparency window at two-photon resonance") {
    const EitParams p = default_eit_params();
    const auto with = lambda_chi(0.0, 0.0, Geometry::CoPropagating, p);
    // stationary atom at line center: Im chi = 1 / (1 + rabi^2 / (2 g12 g3))
    const double expected =
        1.0 / (1.0 + p.rabi_c * p.rabi_c / (2.0 * p.gamma12 * p.gamma3));
    CHECK(with.imag() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(with.imag() < 0.15);
    // a stronger control drives the window into deep transparency
    EitParams strong = p;
    strong.rabi_c = kTwoPi * 10.0e6;
    const auto deep = lambda_chi(0.0, 0.0, Geometry::CoPropagating, strong);
    CHECK(deep.imag() < 0.01);
    CHECK(deep.imag() >= 0.0);
}

TEST_CASE("velocity averaging converges at the default node count") {
    const EitParams p = default_eit_params();
    const AveragedChi avg =
        doppler_averaged_chi(kTwoPi * 1000.0, Geometry::CoPropagating, p, 64);
    CHECK(avg.converged);
    CHECK(avg.refinement <= 1e-6);
    CHECK_THROWS_AS(doppler_averaged_chi(0.0, Geometry::CoPropagating, p, 8),
                    std::invalid_argument);
}

TEST_CASE("absorption stays passive after averaging in both geometries") {
    const EitParams p = default_eit_params();
    for (Geometry geom : {Geometry::CoPropagating, Geometry::CounterPropagating}) {
        for (double f : {-40000.0, -500.0, 0.0, 750.0, 30000.0}) {
            const AveragedChi avg = doppler_averaged_chi(kTwoPi * f, geom, p);
            CHECK(avg.chi.imag() >= -1e-12);
        }
    }
}

TEST_CASE("averaged response is symmetric in probe detuning on resonance") {
    const EitParams p = default_eit_params();
    for (Geometry geom : {Geometry::CoPropagating, Geometry::CounterPropagating}) {
        for (double f : {200.0, 1500.0, 20000.0}) {
            const auto plus = doppler_averaged_chi(kTwoPi * f, geom, p);
            const auto minus = doppler_averaged_chi(-kTwoPi * f, geom, p);
            CHECK(plus.chi.imag() ==
                  doctest::Approx(minus.chi.imag()).epsilon(1e-10));
        }
    }
}

TEST_CASE("co-propagating transparency survives the thermal average") {
    const EitParams p = default_eit_params();
    const auto grid = detuning_grid(200000.0, 401);
    const auto t = transmission(grid, Geometry::CoPropagating, p);
    const double contrast = eit_contrast(t, IndexWindow{0, 40});
    CHECK(contrast > 0.2);
    // the peak sits at the center of the window
    const auto center_it = std::max_element(t.begin(), t.end());
    const size_t center_idx = center_it - t.begin();
    CHECK(std::abs(static_cast<int>(center_idx) - 200) <= 2);
}

TEST_CASE("counter-propagating control washes the window out") {
    const EitParams p = default_eit_params();
    const auto grid = detuning_grid(200000.0, 401);
    const auto forward = transmission(grid, Geometry::CoPropagating, p);
    const auto backward = transmission(grid, Geometry::CounterPropagating, p);
    const double cf = eit_contrast(forward, IndexWindow{0, 40});
    const double cb = eit_contrast(backward, IndexWindow{0, 40});
    CHECK(cb < 0.02 * cf);
}

TEST_CASE("faster thermal motion erodes the counter-propagating window") {
    // resolvable regime: the control power-broadens the window to the few-MHz
    // scale of the residual two-photon shift 2 k u, so the erosion is gradual
    // instead of the window vanishing outright
    std::vector<double> contrasts;
    for (double u : {2.0, 5.0, 12.0}) {
        const EitParams p(kTwoPi * 60.0e6, kTwoPi * 1.0e3, kTwoPi * 350.0e6, 0.0,
                          kTwoPi / 795.0e-9, u, 3.0);
        const auto grid = detuning_grid(1.0e8, 257);
        const auto t = transmission(grid, Geometry::CounterPropagating, p, 256);
        contrasts.push_back(eit_contrast(t, IndexWindow{0, 25}));
    }
    CHECK(contrasts[0] > 1.0);  // still clearly resolvable at the slowest u
    CHECK(contrasts[0] > contrasts[1]);
    CHECK(contrasts[1] > contrasts[2]);
}

TEST_CASE("serial and parallel transmissions agree bit for bit") {
    const EitParams p = default_eit_params();
    const auto grid = detuning_grid(150000.0, 301);
    const auto a = transmission(grid, Geometry::CounterPropagating, p);
    const auto b = transmission_serial(grid, Geometry::CounterPropagating, p);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("contrast summary conventions") {
    const std::vector<double> t = {0.5, 0.5, 0.5, 0.9, 0.5};
    CHECK(eit_contrast(t, IndexWindow{0, 3}) == doctest::Approx(0.8).epsilon(1e-12));
    // peak below baseline floors at zero
    const std::vector<double> flat = {0.5, 0.5, 0.4, 0.3, 0.2};
    CHECK(eit_contrast(flat, IndexWindow{0, 2}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(eit_contrast(t, IndexWindow{3, 2}), std::invalid_argument);
    CHECK_THROWS_AS(eit_contrast(t, IndexWindow{0, 99}), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    const EitParams p = default_eit_params();
    CHECK_THROWS_AS(EitParams(-1.0, p.gamma12, p.gamma3, 0.0, p.k, p.u_thermal, p.od),
                    std::invalid_argument);
    CHECK_THROWS_AS(EitParams(p.rabi_c, p.gamma12, p.gamma3, 0.0, p.k, -5.0, p.od),
                    std::invalid_argument);
    CHECK_THROWS_AS(transmission({1.0, 0.5}, Geometry::CoPropagating, p),
                    std::invalid_argument);
}
