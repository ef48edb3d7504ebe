#pragma once
// Declarative scenario files and the run/sweep engine: strict JSON loading
// with defaults, dispatch to the simulation modules, canonical serialization
// for hashing, and atomic result writes with a reproducibility record.
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chiraldyn/chirality.hpp"
#include "chiraldyn/dynamics.hpp"
#include "chiraldyn/eit.hpp"
#include "chiraldyn/floquet.hpp"
#include "chiraldyn/metrics.hpp"

namespace chiraldyn {

enum class OutputKind { Q, Spectrum, Discord, Eit, Fit };

struct OutputRequest {
    OutputKind kind = OutputKind::Q;
    // Q / Spectrum / Discord options
    std::vector<std::string> selectors;  // Spectrum only; empty -> standard set
    double span_hz = 2000.0;
    int points = 801;
    double bandwidth_hz = 0.0;
    MeasuredMode measure = MeasuredMode::B;  // Discord only
    bool stochastic = false;   // Spectrum only: add a trajectory-based estimate
    double duration_s = 2.0;   // simulated time for the stochastic estimate
    // Eit options
    int quad_points = 64;
    double baseline_frac = 0.1;
    // Fit options
    int order = 0;
    std::string data_path;
};

struct Scenario {
    std::string name;
    BeamConfig beam1;
    BeamConfig beam2;
    ThreeModeModel model;
    bool has_drive = false;
    FloquetDrive drive;
    bool has_eit = false;
    EitParams eit;
    std::vector<OutputRequest> outputs;
    std::uint64_t seed = 1;
    std::string canonical;  // canonical JSON of the validated scenario
};

// Strict parse: unknown keys rejected, enumerations checked, defaults filled,
// cross-field invariants (stability, output prerequisites) enforced.
// Parse errors report line and column; validation errors name the field.
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);

// Deterministic serialization: object keys sorted, floats at 12 significant
// digits, no whitespace. Basis for scenario hashing and golden files.
std::string canonical_json_text(const std::string& json_text);

// FNV-1a 64-bit hash, 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& data);

struct RunRecord {
    std::string scenario_hash;
    std::string version;
    std::string timestamp;  // UTC; honors SOURCE_DATE_EPOCH for reproducible runs
    struct Output {
        std::string kind;
        std::vector<std::string> files;
        std::string status;
    };
    std::vector<Output> outputs;
    std::string status;
};

std::string run_record_to_json(const RunRecord& record);

// Executes every requested output, writing artifacts into out_dir with
// atomic temp-file renames, then the RunRecord JSON. Failures clean up the
// failing output's files and propagate with module context.
RunRecord run_scenario(const Scenario& scenario, const std::string& out_dir);

// Headline scalar metrics per requested output (q_carrier, discord_bits,
// eit_contrast, fit_k_u, spectrum extrema); the sweep table rows.
std::map<std::string, double> summary_metrics(const Scenario& scenario);

struct SweepTable {
    std::string param_path;
    std::vector<std::string> columns;  // "value", then metric names
    std::vector<std::vector<double>> rows;
};

// One summary_metrics evaluation per value, patching param_path (dot path into
// the scenario JSON, e.g. "model.gain") for each; rows keep the values' order.
SweepTable sweep_scenario(const std::string& scenario_text, const std::string& param_path,
                          const std::vector<double>& values);

std::string sweep_to_csv(const SweepTable& table);

const char* to_string(OutputKind kind);

} // namespace chiraldyn
