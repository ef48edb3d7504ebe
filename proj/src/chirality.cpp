#include "chiraldyn/chirality.hpp"

#include <cmath>
#include <stdexcept>

namespace chiraldyn {

BeamConfig::BeamConfig(Handedness h, Direction d, double e0_, double k_, double detuning_)
    : handedness(h), direction(d), e0(e0_), k(k_), detuning(detuning_) {
    if (e0 < 0.0) throw std::invalid_argument("BeamConfig: amplitude must be >= 0");
    if (k <= 0.0) throw std::invalid_argument("BeamConfig: wavenumber must be > 0");
}

std::pair<double, double> circular_field(const BeamConfig& beam, double z) {
    const double phase = beam.k * z;
    // The y-component sign carries the chirality: it flips with handedness and
    // again with propagation direction, so a reversed RHCP beam traces the same
    // spatial profile as a forward LHCP beam.
    const double s = static_cast<double>(effective_chirality(beam));
    return {beam.e0 * std::cos(phase), s * beam.e0 * std::sin(phase)};
}

int effective_chirality(const BeamConfig& beam) {
    const int hand = (beam.handedness == Handedness::RHCP) ? +1 : -1;
    const int dir = (beam.direction == Direction::PlusZ) ? +1 : -1;
    return hand * dir;
}

CouplingKind coupling_kind(const BeamConfig& beam1, const BeamConfig& beam2) {
    return effective_chirality(beam1) == effective_chirality(beam2) ? CouplingKind::DBS
                                                                    : CouplingKind::NHPA;
}

const char* to_string(CouplingKind kind) {
    return kind == CouplingKind::DBS ? "DBS" : "NHPA";
}

const char* to_string(Handedness h) {
    return h == Handedness::RHCP ? "R" : "L";
}

const char* to_string(Direction d) {
    return d == Direction::PlusZ ? "+z" : "-z";
}

} // namespace chiraldyn
