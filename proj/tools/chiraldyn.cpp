// chiraldyn command line: run scenario files, sweep a parameter, or evaluate
// one-off metrics without writing artifacts.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chiraldyn/analysis.hpp"
#include "chiraldyn/errors.hpp"
#include "chiraldyn/gaussian.hpp"
#include "chiraldyn/metrics.hpp"
#include "chiraldyn/scenario.hpp"
#include "chiraldyn/version.hpp"

#include <json.hpp>

namespace {

using namespace chiraldyn;

void apply_thread_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("CHIRALDYN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "1,2,3" or "lo:hi:count" (inclusive endpoints).
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0;
        int count = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
            throw ValidationError("--values range form is lo:hi:count with count >= 1");
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        return out;
    }
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (!end || *end != '\0' || item.empty())
            throw ValidationError("--values: \"" + item + "\" is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("--values: empty list");
    return out;
}

Scenario load_with_seed(const std::string& path, long long seed_override) {
    std::string text = slurp(path);
    if (seed_override >= 0) {
        nlohmann::json j = nlohmann::json::parse(text);
        j["seed"] = static_cast<std::uint64_t>(seed_override);
        text = j.dump();
    }
    return scenario_from_json(text);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"chiral three-mode noise simulator"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute a scenario file, writing artifacts");
    std::string run_path, run_out = ".";
    long long run_seed = -1;
    run->add_option("scenario", run_path, "scenario JSON file")->required();
    run->add_option("--out", run_out, "output directory (default .)");
    run->add_option("--seed", run_seed, "override the scenario seed");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "rerun summary metrics over a parameter grid");
    std::string sweep_path, sweep_param, sweep_values, sweep_out;
    sweep->add_option("scenario", sweep_path, "scenario JSON file")->required();
    sweep->add_option("--param", sweep_param, "dot path, e.g. model.gain")->required();
    sweep->add_option("--values", sweep_values, "comma list or lo:hi:count")->required();
    sweep->add_option("--out", sweep_out, "CSV file (default stdout)");

    // validate
    auto* validate = app.add_subcommand("validate", "parse a scenario and print its hash");
    std::string validate_path;
    validate->add_option("scenario", validate_path, "scenario JSON file")->required();

    // discord
    auto* discord = app.add_subcommand("discord", "Q and Gaussian discord at the carrier");
    std::string discord_path, discord_cov, discord_measure = "B";
    discord->add_option("scenario", discord_path,
                        "scenario JSON file (spectral covariance at the carrier)");
    discord->add_option("--cov", discord_cov,
                        "two-mode covariance JSON file, evaluated directly");
    discord->add_option("--measure", discord_measure, "measured mode, A or B (default B)");

    // eit
    auto* eit = app.add_subcommand("eit", "Doppler-averaged transmission contrast");
    std::string eit_path;
    int eit_points = 1001;
    double eit_span = 200000.0;
    eit->add_option("scenario", eit_path, "scenario JSON file (needs an eit section)")
        ->required();
    eit->add_option("--span-hz", eit_span, "probe detuning span (default 200 kHz)");
    eit->add_option("--points", eit_points, "grid points (default 1001)");

    // fit-bessel
    auto* fit = app.add_subcommand("fit-bessel", "fit a * J_n(k_u / nu1) to CSV data");
    std::string fit_data;
    int fit_order = 0;
    fit->add_option("--data", fit_data, "CSV with nu1_hz,amplitude rows")->required();
    fit->add_option("--order", fit_order, "Bessel order, 0 or 1 (default 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*run) {
        const Scenario s = load_with_seed(run_path, run_seed);
        const RunRecord record = run_scenario(s, run_out);
        for (const auto& o : record.outputs) {
            std::cout << o.status << "  " << o.kind;
            for (const auto& f : o.files) std::cout << "  " << f;
            std::cout << "\n";
        }
        std::cout << "record  " << s.name << "_record.json  hash " << record.scenario_hash
                  << "\n";
    } else if (*sweep) {
        const SweepTable table =
            sweep_scenario(slurp(sweep_path), sweep_param, parse_values(sweep_values));
        const std::string csv = sweep_to_csv(table);
        if (sweep_out.empty()) {
            std::cout << csv;
        } else {
            std::ofstream out(sweep_out, std::ios::binary | std::ios::trunc);
            if (!out) throw IoFailure("cannot open " + sweep_out + " for writing");
            out << csv;
        }
    } else if (*validate) {
        const Scenario s = scenario_from_json(slurp(validate_path));
        std::cout << "ok  " << s.name << "  hash " << fnv1a_hex(s.canonical) << "\n";
    } else if (*discord) {
        MeasuredMode m;
        if (discord_measure == "A") m = MeasuredMode::A;
        else if (discord_measure == "B") m = MeasuredMode::B;
        else throw ValidationError("--measure: expected A or B");
        if (discord_path.empty() == discord_cov.empty())
            throw ValidationError("discord: pass a scenario file or --cov, not both");
        if (!discord_cov.empty()) {
            const GaussianState state = state_from_json(slurp(discord_cov));
            if (state.n_modes != 2)
                throw ValidationError("--cov: expected a two-mode covariance");
            const DiscordResult d = gaussian_discord(state.cov, m);
            const double q = quantum_correlation_Q(joint_variances_from_cov(state.cov));
            std::cout << metrics_to_json(q, d) << "\n";
        } else {
            const Scenario s = scenario_from_json(slurp(discord_path));
            const FloquetDrive* drive = s.has_drive ? &s.drive : nullptr;
            const double center =
                s.model.carrier_hz + (drive ? drive->carrier_offset_hz : 0.0);
            const SpectralDiscord sd = discord_at_frequency(s.model, drive, center, m);
            std::cout << metrics_to_json(sd.q, sd.discord) << "\n";
        }
    } else if (*eit) {
        const Scenario s = scenario_from_json(slurp(eit_path));
        if (!s.has_eit) throw ValidationError("scenario has no eit section");
        const Geometry geom = (s.beam1.direction == s.beam2.direction)
                                  ? Geometry::CoPropagating
                                  : Geometry::CounterPropagating;
        std::vector<double> grid(eit_points);
        for (int i = 0; i < eit_points; ++i)
            grid[i] = 2.0 * M_PI *
                      (-eit_span / 2.0 + eit_span * i / std::max(1, eit_points - 1));
        const auto t = transmission(grid, geom, s.eit);
        const int base_n = std::max(1, eit_points / 10);
        std::cout << "{\"contrast\":" << eit_contrast(t, IndexWindow{0, base_n})
                  << ",\"geometry\":\""
                  << (geom == Geometry::CoPropagating ? "co-propagating"
                                                      : "counter-propagating")
                  << "\"}\n";
    } else if (*fit) {
        const std::string text = slurp(fit_data);
        std::vector<double> nu, amp;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            double a = 0, b = 0;
            if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) == 2) {
                nu.push_back(a);
                amp.push_back(b);
            }
        }
        const BesselFit f = bessel_fit(nu, amp, fit_order);
        std::cout << "{\"k_u_hz\":" << f.k_u << ",\"amplitude\":" << f.amplitude
                  << ",\"residual_rms\":" << f.residual_rms << "}\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_env();
    try {
        return dispatch(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {  // NumericFailure, NoSteadyState, DataInconsistency
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
