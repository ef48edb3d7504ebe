#include "chiraldyn/scenario.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "chiraldyn/analysis.hpp"
#include "chiraldyn/errors.hpp"
#include "chiraldyn/version.hpp"

namespace chiraldyn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDefaultWavelengthM = 795.0e-9;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// canonical JSON + hashing

void canonical_dump(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // keys already sorted
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                canonical_dump(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                canonical_dump(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();  // integers, strings, bools, null
    }
}

std::string canonical_dump(const json& j) {
    std::string out;
    canonical_dump(j, out);
    return out;
}

json parse_with_location(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1, col = 1;
        const size_t stop = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "scenario parse error at line " << line << ", column " << col << ": "
            << e.what();
        throw ValidationError(msg.str());
    }
}

// ---------------------------------------------------------------------------
// strict field access

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

class StrictObject {
  public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& require(const std::string& key) {
        if (!j_.contains(key)) fail(path_, "missing required key \"" + key + "\"");
        seen_.insert(key);
        return j_.at(key);
    }

    const json* optional(const std::string& key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = require(key);
        if (!v.is_number()) fail(path_ + "." + key, "expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double def) {
        const json* v = optional(key);
        if (!v) return def;
        if (!v->is_number()) fail(path_ + "." + key, "expected a number");
        return v->get<double>();
    }

    int int_or(const std::string& key, int def) {
        const json* v = optional(key);
        if (!v) return def;
        if (!v->is_number_integer()) fail(path_ + "." + key, "expected an integer");
        return v->get<int>();
    }

    std::string string(const std::string& key) {
        const json& v = require(key);
        if (!v.is_string()) fail(path_ + "." + key, "expected a string");
        return v.get<std::string>();
    }

    std::string string_or(const std::string& key, const std::string& def) {
        const json* v = optional(key);
        if (!v) return def;
        if (!v->is_string()) fail(path_ + "." + key, "expected a string");
        return v->get<std::string>();
    }

    bool bool_or(const std::string& key, bool def) {
        const json* v = optional(key);
        if (!v) return def;
        if (!v->is_boolean()) fail(path_ + "." + key, "expected a boolean");
        return v->get<bool>();
    }

    // Strict mode: anything not consumed is an error.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(path_, "unknown key \"" + it.key() + "\"");
    }

    const std::string& path() const { return path_; }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------
// section parsers

BeamConfig parse_beam(const json& j, const std::string& path, double& power_uW,
                      double& detuning_hz) {
    StrictObject o(j, path);
    const std::string hand = o.string("handedness");
    const std::string dir = o.string("direction");
    power_uW = o.number_or("power_uW", 1.0);
    detuning_hz = o.number_or("detuning_hz", 0.0);
    o.finish();
    Handedness h;
    if (hand == "R") h = Handedness::RHCP;
    else if (hand == "L") h = Handedness::LHCP;
    else fail(path + ".handedness", "expected \"R\" or \"L\"");
    Direction d;
    if (dir == "+z") d = Direction::PlusZ;
    else if (dir == "-z") d = Direction::MinusZ;
    else fail(path + ".direction", "expected \"+z\" or \"-z\"");
    if (power_uW <= 0.0) fail(path + ".power_uW", "must be > 0");
    return BeamConfig(h, d, std::sqrt(power_uW), kTwoPi / kDefaultWavelengthM,
                      kTwoPi * detuning_hz);
}

ThreeModeModel parse_model(const json& j, CouplingKind kind, double& g1_hz, double& g2_hz) {
    StrictObject o(j, "model");
    const double gamma_hz = o.number_or("gamma_spin_hz", 100.0);
    const double kappa1_hz = o.number_or("kappa1_hz", 1000.0);
    const double kappa2_hz = o.number_or("kappa2_hz", 1000.0);
    const double delta_hz = o.number_or("delta_spin_hz", 0.0);
    const double carrier = o.number_or("carrier_hz", 298800.0);
    const bool has_gain = o.has("gain");
    const bool has_g = o.has("g1_hz") || o.has("g2_hz");
    if (has_gain && has_g) fail("model", "give either \"gain\" or g1_hz/g2_hz, not both");
    if (gamma_hz <= 0.0) fail("model.gamma_spin_hz", "must be > 0");
    if (kappa1_hz <= 0.0) fail("model.kappa1_hz", "must be > 0");
    if (kappa2_hz <= 0.0) fail("model.kappa2_hz", "must be > 0");
    if (has_g) {
        g1_hz = o.number("g1_hz");
        g2_hz = o.has("g2_hz") ? o.number("g2_hz") : g1_hz;
        if (g1_hz < 0.0) fail("model.g1_hz", "must be >= 0");
        if (g2_hz < 0.0) fail("model.g2_hz", "must be >= 0");
    } else {
        const double gain = o.number_or("gain", 0.35);
        if (gain < 0.0) fail("model.gain", "must be >= 0");
        if (kind == CouplingKind::NHPA && gain >= 1.0)
            fail("model.gain", "amplifier gain must stay below threshold (< 1)");
        // gain = 4 g^2 / (gamma sqrt(kappa1 kappa2)) with g1 = g2 = g.
        const double g_rad =
            std::sqrt(gain * (kTwoPi * gamma_hz) * kTwoPi * std::sqrt(kappa1_hz * kappa2_hz)) /
            2.0;
        g1_hz = g2_hz = g_rad / kTwoPi;
    }
    o.finish();

    ModelParams p;
    p.g1 = kTwoPi * g1_hz;
    p.g2 = kTwoPi * g2_hz;
    p.gamma_spin = kTwoPi * gamma_hz;
    p.kappa1 = kTwoPi * kappa1_hz;
    p.kappa2 = kTwoPi * kappa2_hz;
    p.delta_spin = kTwoPi * delta_hz;
    p.carrier_hz = carrier;
    try {
        return build_model(kind, p);
    } catch (const std::invalid_argument& e) {
        fail("model", e.what());
    }
}

FloquetDrive parse_drive(const json& j) {
    StrictObject o(j, "drive");
    const double nu1 = o.number("nu1_hz");
    if (nu1 <= 0.0) fail("drive.nu1_hz", "must be > 0");
    const bool has_index = o.has("index");
    const bool has_b1 = o.has("b1");
    if (has_index && has_b1) fail("drive", "give either \"index\" or b1/gyromag, not both");
    double b1 = 0.0;
    double gyromag = 1.0;
    if (has_index) {
        const double index = o.number("index");
        if (index < 0.0) fail("drive.index", "must be >= 0");
        b1 = 2.0 * nu1 * index;  // index = gyromag * b1 / (2 nu1) with gyromag = 1
    } else {
        b1 = o.number_or("b1", 0.0);
        gyromag = o.number_or("gyromag", 1.0);
        if (b1 < 0.0) fail("drive.b1", "must be >= 0");
        if (gyromag <= 0.0) fail("drive.gyromag", "must be > 0");
    }
    const double b0 = o.number_or("b0", 0.0);
    const double k_u = o.number_or("k_u_hz", 0.0);
    const int n_max = o.int_or("n_max", 3);
    const double offset = o.number_or("carrier_offset_hz", 0.0);
    o.finish();
    if (n_max < 0 || n_max > 10) fail("drive.n_max", "must be in 0..10");
    try {
        return FloquetDrive(nu1, b1, b0, gyromag, k_u, n_max, offset);
    } catch (const std::invalid_argument& e) {
        fail("drive", e.what());
    }
}

EitParams parse_eit(const json& j) {
    StrictObject o(j, "eit");
    const double rabi_hz = o.number_or("rabi_c_hz", 2.0e6);
    const double gamma12_hz = o.number_or("gamma12_hz", 500.0);
    const double gamma3_hz = o.number_or("gamma3_hz", 350.0e6);
    const double delta_c_hz = o.number_or("delta_c_hz", 0.0);
    const bool has_lambda = o.has("lambda_nm");
    const bool has_k = o.has("k_rad_per_m");
    if (has_lambda && has_k) fail("eit", "give either \"lambda_nm\" or \"k_rad_per_m\"");
    double k = kTwoPi / kDefaultWavelengthM;
    if (has_lambda) {
        const double lambda_nm = o.number("lambda_nm");
        if (lambda_nm <= 0.0) fail("eit.lambda_nm", "must be > 0");
        k = kTwoPi / (lambda_nm * 1e-9);
    } else if (has_k) {
        k = o.number("k_rad_per_m");
    }
    const double u = o.number_or("u_thermal", 160.0);
    const double od = o.number_or("od", 3.0);
    o.finish();
    try {
        return EitParams(kTwoPi * rabi_hz, kTwoPi * gamma12_hz, kTwoPi * gamma3_hz,
                         kTwoPi * delta_c_hz, k, u, od);
    } catch (const std::invalid_argument& e) {
        fail("eit", e.what());
    }
}

OutputRequest parse_output(const json& j, const std::string& path, bool scenario_has_eit) {
    StrictObject o(j, path);
    const std::string kind = o.string("kind");
    OutputRequest req;
    if (kind == "Q") {
        req.kind = OutputKind::Q;
        req.span_hz = o.number_or("span_hz", 2000.0);
        req.points = o.int_or("points", 801);
        req.bandwidth_hz = o.number_or("bandwidth_hz", 100.0);
    } else if (kind == "Spectrum") {
        req.kind = OutputKind::Spectrum;
        req.span_hz = o.number_or("span_hz", 2000.0);
        req.points = o.int_or("points", 801);
        req.bandwidth_hz = o.number_or("bandwidth_hz", 0.0);
        if (const json* sel = o.optional("selectors")) {
            if (!sel->is_array() || sel->empty())
                fail(path + ".selectors", "expected a non-empty array of labels");
            for (const auto& s : *sel) {
                if (!s.is_string()) fail(path + ".selectors", "labels must be strings");
                try {
                    selector_from_label(s.get<std::string>());
                } catch (const std::invalid_argument& e) {
                    fail(path + ".selectors", e.what());
                }
                req.selectors.push_back(s.get<std::string>());
            }
        } else {
            for (const auto& s : standard_selectors()) req.selectors.push_back(s.label);
        }
        req.stochastic = o.bool_or("stochastic", false);
        req.duration_s = o.number_or("duration_s", 2.0);
        if (req.duration_s <= 0.0) fail(path + ".duration_s", "must be > 0");
    } else if (kind == "Discord") {
        req.kind = OutputKind::Discord;
        const std::string m = o.string_or("measure", "B");
        if (m == "A") req.measure = MeasuredMode::A;
        else if (m == "B") req.measure = MeasuredMode::B;
        else fail(path + ".measure", "expected \"A\" or \"B\"");
    } else if (kind == "Eit") {
        req.kind = OutputKind::Eit;
        if (!scenario_has_eit) fail(path, "Eit output requires an \"eit\" section");
        req.span_hz = o.number_or("span_hz", 200000.0);
        req.points = o.int_or("points", 1001);
        req.quad_points = o.int_or("quad_points", 64);
        req.baseline_frac = o.number_or("baseline_frac", 0.1);
        if (req.baseline_frac <= 0.0 || req.baseline_frac > 0.5)
            fail(path + ".baseline_frac", "must be in (0, 0.5]");
        if (req.quad_points < 32) fail(path + ".quad_points", "must be >= 32");
    } else if (kind == "Fit") {
        req.kind = OutputKind::Fit;
        req.order = o.int_or("order", 0);
        if (req.order != 0 && req.order != 1) fail(path + ".order", "must be 0 or 1");
        req.data_path = o.string("data");
    } else {
        fail(path + ".kind", "expected one of Q, Spectrum, Discord, Eit, Fit");
    }
    if (req.points < 1) fail(path + ".points", "must be >= 1");
    if (req.points > 1 && req.span_hz <= 0.0) fail(path + ".span_hz", "must be > 0");
    if (req.bandwidth_hz < 0.0) fail(path + ".bandwidth_hz", "must be >= 0");
    o.finish();
    return req;
}

json normalize_beam(const BeamConfig& b, double power_uW, double detuning_hz) {
    json j;
    j["handedness"] = to_string(b.handedness);
    j["direction"] = to_string(b.direction);
    j["power_uW"] = power_uW;
    j["detuning_hz"] = detuning_hz;
    return j;
}

json normalize_output(const OutputRequest& r) {
    json j;
    j["kind"] = to_string(r.kind);
    switch (r.kind) {
        case OutputKind::Q:
            j["span_hz"] = r.span_hz;
            j["points"] = r.points;
            j["bandwidth_hz"] = r.bandwidth_hz;
            break;
        case OutputKind::Spectrum: {
            j["span_hz"] = r.span_hz;
            j["points"] = r.points;
            j["bandwidth_hz"] = r.bandwidth_hz;
            j["selectors"] = r.selectors;
            j["stochastic"] = r.stochastic;
            j["duration_s"] = r.duration_s;
            break;
        }
        case OutputKind::Discord:
            j["measure"] = (r.measure == MeasuredMode::A) ? "A" : "B";
            break;
        case OutputKind::Eit:
            j["span_hz"] = r.span_hz;
            j["points"] = r.points;
            j["quad_points"] = r.quad_points;
            j["baseline_frac"] = r.baseline_frac;
            break;
        case OutputKind::Fit:
            j["order"] = r.order;
            j["data"] = r.data_path;
            break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// filesystem helpers

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("error reading " + path);
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoFailure("error writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoFailure("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

std::string make_timestamp() {
    std::time_t t;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string kind_suffix(OutputKind kind) {
    switch (kind) {
        case OutputKind::Q: return "q";
        case OutputKind::Spectrum: return "spectrum";
        case OutputKind::Discord: return "discord";
        case OutputKind::Eit: return "eit";
        case OutputKind::Fit: return "fit";
    }
    return "unknown";
}

std::vector<double> centered_grid(double center, double span_hz, int points) {
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = center;
        return grid;
    }
    for (int i = 0; i < points; ++i)
        grid[i] = center - span_hz / 2.0 + span_hz * i / (points - 1);
    return grid;
}

std::pair<std::vector<double>, std::vector<double>> read_fit_csv(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<double> nu, amp;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw DataInconsistency(path + ":" + std::to_string(lineno) +
                                    ": expected two comma-separated columns");
        char* end1 = nullptr;
        char* end2 = nullptr;
        const std::string c1 = line.substr(0, comma);
        const std::string c2 = line.substr(comma + 1);
        const double v1 = std::strtod(c1.c_str(), &end1);
        const double v2 = std::strtod(c2.c_str(), &end2);
        const bool ok1 = end1 && *end1 == '\0' && !c1.empty();
        const bool ok2 = end2 && (*end2 == '\0' || *end2 == '\r') && !c2.empty();
        if (!ok1 || !ok2) {
            if (lineno == 1) continue;  // header row
            throw DataInconsistency(path + ":" + std::to_string(lineno) +
                                    ": expected two numeric columns");
        }
        nu.push_back(v1);
        amp.push_back(v2);
    }
    return {nu, amp};
}

// ---------------------------------------------------------------------------
// output rendering

struct RenderedFile {
    std::string name;
    std::string content;
};

std::vector<RenderedFile> render_output(const Scenario& s, size_t idx) {
    const OutputRequest& req = s.outputs[idx];
    const std::string stem = s.name + "_" + std::to_string(idx) + "_" + kind_suffix(req.kind);
    const FloquetDrive* drive = s.has_drive ? &s.drive : nullptr;
    std::vector<RenderedFile> files;

    switch (req.kind) {
        case OutputKind::Q: {
            const QSpectrum qs =
                q_spectrum(s.model, drive, req.span_hz, req.points, req.bandwidth_hz);
            std::string csv = "freq_hz,q\n";
            for (size_t i = 0; i < qs.freq_hz.size(); ++i)
                csv += format_double(qs.freq_hz[i]) + "," + format_double(qs.q[i]) + "\n";
            json summary;
            summary["carrier_hz"] = qs.carrier_hz;
            summary["q_carrier"] = qs.q_carrier;
            summary["fwhm_hz"] = qs.fwhm_hz;
            files.push_back({stem + ".csv", std::move(csv)});
            files.push_back({stem + ".json", canonical_dump(summary) + "\n"});
            break;
        }
        case OutputKind::Spectrum: {
            std::vector<QuadratureSelector> selectors;
            for (const auto& label : req.selectors)
                selectors.push_back(selector_from_label(label));
            const double center = s.model.carrier_hz + (drive ? drive->carrier_offset_hz : 0.0);
            const auto grid = centered_grid(center, req.span_hz, req.points);
            NoiseSpectrum spec;
            if (drive) {
                spec = multicolor_spectrum(s.model, *drive, selectors, grid);
            } else {
                spec = output_noise_spectrum(drift_diffusion(s.model), selectors, grid,
                                             req.bandwidth_hz);
            }
            files.push_back({stem + ".csv", spectrum_to_csv(spec)});
            if (req.stochastic) {
                const DriftDiffusion dd = drift_diffusion(s.model);
                Eigen::EigenSolver<Matrix> es(dd.A, false);
                const double speed = es.eigenvalues().cwiseAbs().maxCoeff();
                const double dt = 0.02 / std::max(speed, 1e-6);
                const NoiseSpectrum sim = stochastic_trajectory_spectrum(
                    dd, selectors.front(), req.duration_s, dt, s.seed);
                std::string csv = "freq_hz," + selectors.front().label + ",stderr\n";
                const auto& vals = sim.series.at(selectors.front().label);
                const auto& errs = sim.stderr_est.at(selectors.front().label);
                for (size_t i = 0; i < sim.freq_hz.size(); ++i)
                    csv += format_double(sim.freq_hz[i]) + "," + format_double(vals[i]) + "," +
                           format_double(errs[i]) + "\n";
                files.push_back({stem + "_sim.csv", std::move(csv)});
            }
            break;
        }
        case OutputKind::Discord: {
            const double center = s.model.carrier_hz + (drive ? drive->carrier_offset_hz : 0.0);
            const SpectralDiscord sd =
                discord_at_frequency(s.model, drive, center, req.measure);
            if (!is_physical(sd.cov))
                throw NumericFailure("discord output: reconstructed covariance unphysical");
            files.push_back({stem + ".json", metrics_to_json(sd.q, sd.discord) + "\n"});
            break;
        }
        case OutputKind::Eit: {
            const Geometry geom = (s.beam1.direction == s.beam2.direction)
                                      ? Geometry::CoPropagating
                                      : Geometry::CounterPropagating;
            std::vector<double> grid_rad(req.points);
            for (int i = 0; i < req.points; ++i)
                grid_rad[i] =
                    kTwoPi * (-req.span_hz / 2.0 + req.span_hz * i / (req.points - 1));
            const std::vector<double> t = transmission(grid_rad, geom, s.eit, req.quad_points);
            std::string csv = "delta_hz,transmission\n";
            for (int i = 0; i < req.points; ++i)
                csv += format_double(grid_rad[i] / kTwoPi) + "," + format_double(t[i]) + "\n";
            const int base_n =
                std::max(1, static_cast<int>(req.baseline_frac * req.points));
            const double contrast = eit_contrast(t, IndexWindow{0, base_n});
            json summary;
            summary["contrast"] = contrast;
            summary["geometry"] =
                geom == Geometry::CoPropagating ? "co-propagating" : "counter-propagating";
            files.push_back({stem + ".csv", std::move(csv)});
            files.push_back({stem + ".json", canonical_dump(summary) + "\n"});
            break;
        }
        case OutputKind::Fit: {
            const auto [nu, amp] = read_fit_csv(req.data_path);
            const BesselFit fit = bessel_fit(nu, amp, req.order);
            json summary;
            summary["order"] = req.order;
            summary["k_u_hz"] = fit.k_u;
            summary["amplitude"] = fit.amplitude;
            summary["residual_rms"] = fit.residual_rms;
            files.push_back({stem + ".json", canonical_dump(summary) + "\n"});
            break;
        }
    }
    return files;
}

} // namespace

Scenario scenario_from_json(const std::string& text) {
    const json root = parse_with_location(text);
    StrictObject o(root, "scenario");

    Scenario s;
    s.name = o.string("name");
    if (s.name.empty()) fail("name", "must be non-empty");
    for (char c : s.name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            fail("name", "only [A-Za-z0-9_-] allowed (used in file names)");

    const json& beams = o.require("beams");
    if (!beams.is_array() || beams.size() != 2)
        fail("beams", "expected an array of exactly 2 beam objects");
    double p1 = 0, p2 = 0, det1 = 0, det2 = 0;
    s.beam1 = parse_beam(beams[0], "beams[0]", p1, det1);
    s.beam2 = parse_beam(beams[1], "beams[1]", p2, det2);

    const CouplingKind kind = coupling_kind(s.beam1, s.beam2);
    double g1_hz = 0, g2_hz = 0;
    s.model = parse_model(o.require("model"), kind, g1_hz, g2_hz);

    if (const json* d = o.optional("drive")) {
        s.drive = parse_drive(*d);
        s.has_drive = true;
    }
    if (const json* e = o.optional("eit")) {
        s.eit = parse_eit(*e);
        s.has_eit = true;
    }

    const json& outputs = o.require("outputs");
    if (!outputs.is_array() || outputs.empty())
        fail("outputs", "expected a non-empty array");
    for (size_t i = 0; i < outputs.size(); ++i)
        s.outputs.push_back(parse_output(outputs[i],
                                         "outputs[" + std::to_string(i) + "]", s.has_eit));

    if (const json* seed = o.optional("seed")) {
        if (!seed->is_number_unsigned())
            fail("seed", "expected a non-negative integer");
        s.seed = seed->get<std::uint64_t>();
    }
    o.finish();

    // Normalized form: every default materialized, derived gain replaced by
    // explicit couplings. This is what gets hashed and what round-trips.
    json norm;
    norm["name"] = s.name;
    norm["beams"] = json::array({normalize_beam(s.beam1, p1, det1),
                                 normalize_beam(s.beam2, p2, det2)});
    json model;
    model["g1_hz"] = g1_hz;
    model["g2_hz"] = g2_hz;
    model["gamma_spin_hz"] = s.model.gamma_spin / kTwoPi;
    model["kappa1_hz"] = s.model.kappa1 / kTwoPi;
    model["kappa2_hz"] = s.model.kappa2 / kTwoPi;
    model["delta_spin_hz"] = s.model.delta_spin / kTwoPi;
    model["carrier_hz"] = s.model.carrier_hz;
    norm["model"] = model;
    if (s.has_drive) {
        json d;
        d["nu1_hz"] = s.drive.nu1_hz;
        d["b1"] = s.drive.b1;
        d["b0"] = s.drive.b0;
        d["gyromag"] = s.drive.gyromag;
        d["k_u_hz"] = s.drive.k_u;
        d["n_max"] = s.drive.n_max;
        d["carrier_offset_hz"] = s.drive.carrier_offset_hz;
        norm["drive"] = d;
    }
    if (s.has_eit) {
        json e;
        e["rabi_c_hz"] = s.eit.rabi_c / kTwoPi;
        e["gamma12_hz"] = s.eit.gamma12 / kTwoPi;
        e["gamma3_hz"] = s.eit.gamma3 / kTwoPi;
        e["delta_c_hz"] = s.eit.delta_c / kTwoPi;
        e["k_rad_per_m"] = s.eit.k;
        e["u_thermal"] = s.eit.u_thermal;
        e["od"] = s.eit.od;
        norm["eit"] = e;
    }
    json outs = json::array();
    for (const auto& r : s.outputs) outs.push_back(normalize_output(r));
    norm["outputs"] = outs;
    norm["seed"] = s.seed;
    s.canonical = canonical_dump(norm);
    return s;
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_json(read_file(path));
}

std::string canonical_json_text(const std::string& json_text) {
    return canonical_dump(parse_with_location(json_text));
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string run_record_to_json(const RunRecord& record) {
    json j;
    j["scenario_hash"] = record.scenario_hash;
    j["version"] = record.version;
    j["timestamp"] = record.timestamp;
    j["status"] = record.status;
    json outs = json::array();
    for (const auto& o : record.outputs) {
        json jo;
        jo["kind"] = o.kind;
        jo["files"] = o.files;
        jo["status"] = o.status;
        outs.push_back(jo);
    }
    j["outputs"] = outs;
    return canonical_dump(j) + "\n";
}

RunRecord run_scenario(const Scenario& scenario, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoFailure("cannot create output directory " + out_dir + ": " + ec.message());

    RunRecord record;
    record.scenario_hash = fnv1a_hex(scenario.canonical);
    record.version = kVersion;
    record.timestamp = make_timestamp();

    for (size_t i = 0; i < scenario.outputs.size(); ++i) {
        std::vector<RenderedFile> files;
        const std::string ctx = "output " + std::to_string(i) + " (" +
                                std::string(to_string(scenario.outputs[i].kind)) + "): ";
        try {
            files = render_output(scenario, i);
        } catch (const ValidationError& e) {
            throw ValidationError(ctx + e.what());
        } catch (const NoSteadyState& e) {
            throw NoSteadyState(ctx + e.what());
        } catch (const DataInconsistency& e) {
            throw DataInconsistency(ctx + e.what());
        } catch (const NumericFailure& e) {
            throw NumericFailure(ctx + e.what());
        } catch (const IoFailure& e) {
            throw IoFailure(ctx + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(ctx + e.what());
        }
        RunRecord::Output rec_out;
        rec_out.kind = to_string(scenario.outputs[i].kind);
        rec_out.status = "ok";
        std::vector<fs::path> written;
        try {
            for (const auto& f : files) {
                const fs::path target = fs::path(out_dir) / f.name;
                write_file_atomic(target, f.content);
                written.push_back(target);
                rec_out.files.push_back(f.name);
            }
        } catch (...) {
            for (const auto& p : written) fs::remove(p, ec);  // all-or-nothing per output
            throw;
        }
        record.outputs.push_back(std::move(rec_out));
    }
    record.status = "ok";
    write_file_atomic(fs::path(out_dir) / (scenario.name + "_record.json"),
                      run_record_to_json(record));
    return record;
}

std::map<std::string, double> summary_metrics(const Scenario& s) {
    std::map<std::string, double> out;
    const FloquetDrive* drive = s.has_drive ? &s.drive : nullptr;
    const auto put = [&out](const std::string& key, double v) {
        std::string k = key;
        int suffix = 2;
        while (out.count(k)) k = key + "_" + std::to_string(suffix++);
        out[k] = v;
    };
    for (const auto& req : s.outputs) {
        switch (req.kind) {
            case OutputKind::Q: {
                const QSpectrum qs =
                    q_spectrum(s.model, drive, req.span_hz, req.points, req.bandwidth_hz);
                put("q_carrier", qs.q_carrier);
                put("q_fwhm_hz", qs.fwhm_hz);
                break;
            }
            case OutputKind::Discord: {
                const double center =
                    s.model.carrier_hz + (drive ? drive->carrier_offset_hz : 0.0);
                const SpectralDiscord sd =
                    discord_at_frequency(s.model, drive, center, req.measure);
                put("discord_bits", sd.discord.discord);
                put("discord_q", sd.q);
                break;
            }
            case OutputKind::Spectrum: {
                std::vector<QuadratureSelector> selectors;
                for (const auto& label : req.selectors)
                    selectors.push_back(selector_from_label(label));
                const double center =
                    s.model.carrier_hz + (drive ? drive->carrier_offset_hz : 0.0);
                const auto grid = centered_grid(center, req.span_hz, req.points);
                NoiseSpectrum spec;
                if (drive) {
                    spec = multicolor_spectrum(s.model, *drive, selectors, grid);
                } else {
                    spec = output_noise_spectrum(drift_diffusion(s.model), selectors, grid,
                                                 req.bandwidth_hz);
                }
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (const auto& [label, vals] : spec.series)
                    for (double v : vals) {
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                put("spectrum_min", lo);
                put("spectrum_max", hi);
                break;
            }
            case OutputKind::Eit: {
                const Geometry geom = (s.beam1.direction == s.beam2.direction)
                                          ? Geometry::CoPropagating
                                          : Geometry::CounterPropagating;
                std::vector<double> grid_rad(req.points);
                for (int i = 0; i < req.points; ++i)
                    grid_rad[i] =
                        kTwoPi * (-req.span_hz / 2.0 + req.span_hz * i / (req.points - 1));
                const auto t = transmission(grid_rad, geom, s.eit, req.quad_points);
                const int base_n =
                    std::max(1, static_cast<int>(req.baseline_frac * req.points));
                put("eit_contrast", eit_contrast(t, IndexWindow{0, base_n}));
                break;
            }
            case OutputKind::Fit: {
                const auto [nu, amp] = read_fit_csv(req.data_path);
                const BesselFit fit = bessel_fit(nu, amp, req.order);
                put("fit_k_u_hz", fit.k_u);
                put("fit_residual_rms", fit.residual_rms);
                break;
            }
        }
    }
    return out;
}

namespace {

void collect_numeric_paths(const json& j, const std::string& prefix,
                           std::vector<std::string>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            collect_numeric_paths(it.value(),
                                  prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            collect_numeric_paths(j[i],
                                  prefix.empty() ? std::to_string(i)
                                                 : prefix + "." + std::to_string(i),
                                  out);
    } else if (j.is_number()) {
        out.push_back(prefix);
    }
}

bool is_index(const std::string& s) {
    return !s.empty() && s.size() <= 9 &&
           s.find_first_not_of("0123456789") == std::string::npos;
}

} // namespace

SweepTable sweep_scenario(const std::string& scenario_text, const std::string& param_path,
                          const std::vector<double>& values) {
    json root = parse_with_location(scenario_text);

    // Resolve the dot path up front so errors fire before any work happens.
    std::vector<std::string> segments;
    std::istringstream ss(param_path);
    std::string seg;
    while (std::getline(ss, seg, '.')) segments.push_back(seg);
    const auto listing = [&root]() {
        std::vector<std::string> valid;
        collect_numeric_paths(root, "", valid);
        std::string list;
        for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
        return list;
    };
    json* node = &root;
    for (size_t si = 0; si < segments.size(); ++si) {
        const std::string& s = segments[si];
        const bool last = si + 1 == segments.size();
        if (node->is_object() && node->contains(s)) {
            node = &node->at(s);
        } else if (node->is_array() && is_index(s) && std::stoul(s) < node->size()) {
            node = &node->at(std::stoul(s));
        } else if (last && node->is_object()) {
            // absent leaf under an existing section: the sweep inserts it, so
            // defaulted parameters can be swept without pinning them in the file
            node = nullptr;
            break;
        } else {
            throw ValidationError("sweep: path \"" + param_path +
                                  "\" not found; numeric paths: " + listing());
        }
    }
    if (node && !node->is_number())
        throw ValidationError("sweep: path \"" + param_path +
                              "\" is not numeric; numeric paths: " + listing());

    SweepTable table;
    table.param_path = param_path;
    if (values.empty()) {
        table.columns = {"value"};
        return table;
    }

    std::vector<std::map<std::string, double>> metrics(values.size());
    std::vector<std::string> errors(values.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        try {
            json patched = root;
            json* leaf = &patched;
            for (size_t si = 0; si + 1 < segments.size(); ++si) {
                const std::string& sg = segments[si];
                leaf = leaf->is_array() ? &leaf->at(std::stoul(sg)) : &leaf->at(sg);
            }
            if (leaf->is_array())
                leaf->at(std::stoul(segments.back())) = values[i];
            else
                (*leaf)[segments.back()] = values[i];
            const Scenario s = scenario_from_json(patched.dump());
            metrics[i] = summary_metrics(s);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (size_t i = 0; i < values.size(); ++i)
        if (!errors[i].empty()) {
            std::string msg =
                "sweep: value " + format_double(values[i]) + ": " + errors[i];
            // a typo in the final path segment surfaces here as an unknown key;
            // list the alternatives just like an unresolvable path would
            if (errors[i].find("unknown key") != std::string::npos)
                msg += "; numeric paths: " + listing();
            throw ValidationError(msg);
        }

    std::set<std::string> keys;
    for (const auto& m : metrics)
        for (const auto& [k, v] : m) keys.insert(k);
    table.columns.push_back("value");
    for (const auto& k : keys) table.columns.push_back(k);
    for (size_t i = 0; i < values.size(); ++i) {
        std::vector<double> row;
        row.push_back(values[i]);
        for (const auto& k : keys) {
            auto it = metrics[i].find(k);
            row.push_back(it == metrics[i].end()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : it->second);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string sweep_to_csv(const SweepTable& table) {
    std::string out;
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ",";
        out += table.columns[i];
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += format_double(row[i]);
        }
        out += "\n";
    }
    return out;
}

const char* to_string(OutputKind kind) {
    switch (kind) {
        case OutputKind::Q: return "Q";
        case OutputKind::Spectrum: return "Spectrum";
        case OutputKind::Discord: return "Discord";
        case OutputKind::Eit: return "Eit";
        case OutputKind::Fit: return "Fit";
    }
    return "unknown";
}

} // namespace chiraldyn
