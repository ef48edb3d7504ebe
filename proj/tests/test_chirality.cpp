#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "chiraldyn/chirality.hpp"

using namespace chiraldyn;

namespace {

BeamConfig beam(Handedness h, Direction d) { return BeamConfig(h, d); }

} // namespace

TEST_CASE("the four co/counter polarization configurations classify correctly") {
    const BeamConfig r_plus = beam(Handedness::RHCP, Direction::PlusZ);
    const BeamConfig r_minus = beam(Handedness::RHCP, Direction::MinusZ);
    const BeamConfig l_plus = beam(Handedness::LHCP, Direction::PlusZ);
    const BeamConfig l_minus = beam(Handedness::LHCP, Direction::MinusZ);

    // same handedness, same direction -> same chirality -> passive exchange
    CHECK(coupling_kind(r_plus, r_plus) == CouplingKind::DBS);
    // same handedness, opposite direction -> opposite chirality -> amplifier
    CHECK(coupling_kind(r_plus, r_minus) == CouplingKind::NHPA);
    // opposite handedness, same direction -> opposite chirality -> amplifier
    CHECK(coupling_kind(r_plus, l_plus) == CouplingKind::NHPA);
    // flipping both restores the chirality match
    CHECK(coupling_kind(r_plus, l_minus) == CouplingKind::DBS);
}

TEST_CASE("flipping either handedness or direction toggles the kind") {
    const Handedness hands[] = {Handedness::RHCP, Handedness::LHCP};
    const Direction dirs[] = {Direction::PlusZ, Direction::MinusZ};
    for (Handedness h1 : hands)
        for (Direction d1 : dirs)
            for (Handedness h2 : hands)
                for (Direction d2 : dirs) {
                    const CouplingKind base = coupling_kind(beam(h1, d1), beam(h2, d2));
                    const Handedness h2_flip =
                        h2 == Handedness::RHCP ? Handedness::LHCP : Handedness::RHCP;
                    const Direction d2_flip =
                        d2 == Direction::PlusZ ? Direction::MinusZ : Direction::PlusZ;
                    CHECK(coupling_kind(beam(h1, d1), beam(h2_flip, d2)) != base);
                    CHECK(coupling_kind(beam(h1, d1), beam(h2, d2_flip)) != base);
                    CHECK(coupling_kind(beam(h1, d1), beam(h2_flip, d2_flip)) == base);
                    // symmetry under swapping the two beams
                    CHECK(coupling_kind(beam(h2, d2), beam(h1, d1)) == base);
                }
}

TEST_CASE("effective chirality is the handedness sign times the direction sign") {
    CHECK(effective_chirality(beam(Handedness::RHCP, Direction::PlusZ)) == 1);
    CHECK(effective_chirality(beam(Handedness::RHCP, Direction::MinusZ)) == -1);
    CHECK(effective_chirality(beam(Handedness::LHCP, Direction::PlusZ)) == -1);
    CHECK(effective_chirality(beam(Handedness::LHCP, Direction::MinusZ)) == 1);
}

TEST_CASE("field traces coincide exactly when the coupling is passive") {
    const Handedness hands[] = {Handedness::RHCP, Handedness::LHCP};
    const Direction dirs[] = {Direction::PlusZ, Direction::MinusZ};
    for (Handedness h1 : hands)
        for (Direction d1 : dirs)
            for (Handedness h2 : hands)
                for (Direction d2 : dirs) {
                    const BeamConfig b1 = beam(h1, d1);
                    const BeamConfig b2 = beam(h2, d2);
                    double max_diff = 0.0;
                    for (int i = 0; i < 64; ++i) {
                        const double z = -3.0 + 6.0 * i / 63.0;
                        const auto [x1, y1] = circular_field(b1, z);
                        const auto [x2, y2] = circular_field(b2, z);
                        max_diff = std::max(max_diff, std::hypot(x1 - x2, y1 - y2));
                    }
                    if (coupling_kind(b1, b2) == CouplingKind::DBS) {
                        CHECK(max_diff < 1e-12);
                    } else {
                        CHECK(max_diff > 0.1);
                    }
                }
}

TEST_CASE("field profile traces a unit circle over one wavelength") {
    const BeamConfig b(Handedness::LHCP, Direction::PlusZ, 2.0, 3.0);
    for (int i = 0; i < 32; ++i) {
        const double z = i * 0.2;
        const auto [x, y] = circular_field(b, z);
        CHECK(std::hypot(x, y) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("beam parameter validation") {
    CHECK_THROWS_AS(BeamConfig(Handedness::RHCP, Direction::PlusZ, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(BeamConfig(Handedness::RHCP, Direction::PlusZ, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("names for reports") {
    CHECK(std::string(to_string(CouplingKind::DBS)) == "DBS");
    CHECK(std::string(to_string(CouplingKind::NHPA)) == "NHPA");
    CHECK(std::string(to_string(Handedness::RHCP)) == "R");
    CHECK(std::string(to_string(Direction::MinusZ)) == "-z");
}
