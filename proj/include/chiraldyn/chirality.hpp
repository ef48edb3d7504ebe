#pragma once
// Circular-polarization algebra for a pair of control beams and the rule that
// maps their (handedness, direction) configuration to the effective coupling
// kind seen by the atoms.
#include <utility>

namespace chiraldyn {

enum class Handedness { RHCP, LHCP };
enum class Direction { PlusZ, MinusZ };

struct BeamConfig {
    Handedness handedness = Handedness::RHCP;
    Direction direction = Direction::PlusZ;
    double e0 = 1.0;        // field amplitude, arbitrary units, >= 0
    double k = 1.0;         // wavenumber, rad per length, > 0
    double detuning = 0.0;  // rad/s from two-photon resonance

    BeamConfig() = default;
    BeamConfig(Handedness h, Direction d, double e0 = 1.0, double k = 1.0,
               double detuning = 0.0);  // rejects e0 < 0 or k <= 0
};

// Passive exchange (DBS) vs two-mode-squeezing (NHPA) effective coupling.
enum class CouplingKind { DBS, NHPA };

// Spatial field profile with the time-dependent phase dropped:
// returns (Ex, Ey) at position z.
std::pair<double, double> circular_field(const BeamConfig& beam, double z);

// +1 or -1: handedness sign (RHCP=+1) times propagation sign (+z=+1).
// Two beams drive the same atomic transition chain iff their products match.
int effective_chirality(const BeamConfig& beam);

// DBS when the two beams present the same effective chirality, NHPA otherwise.
CouplingKind coupling_kind(const BeamConfig& beam1, const BeamConfig& beam2);

const char* to_string(CouplingKind kind);
const char* to_string(Handedness h);
const char* to_string(Direction d);

} // namespace chiraldyn
