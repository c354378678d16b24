// Command-line driver: experiment selection, configuration, seeding, and
// report emission. Data goes to files or stdout; progress goes to stderr.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orrw/registry.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct RunOutputs {
    nlohmann::json manifest_entries = nlohmann::json::array();
    bool any_fail = false;
};

void write_reports(const orrw::ExperimentResult& result, const std::string& out_dir,
                   const std::string& format, RunOutputs& outputs) {
    nlohmann::json entry{{"experiment", result.experiment}};
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        if (format == "json" || format == "both") {
            std::string path = out_dir + "/" + result.experiment + ".json";
            std::ofstream(path) << result.to_json().dump(2) << '\n';
            entry["json"] = path;
        }
        if (format == "csv" || format == "both") {
            std::string path = out_dir + "/" + result.experiment + ".csv";
            std::ofstream csv(path);
            result.append_csv(csv, /*header=*/true);
            entry["csv"] = path;
        }
    } else {
        std::cout << result.to_json().dump(2) << std::endl;
    }
    outputs.manifest_entries.push_back(entry);
    outputs.any_fail |= !result.all_asserted_pass();
}

int run_experiments(const std::vector<std::string>& names, const orrw::ExperimentConfig& base,
                    const std::vector<std::pair<std::string, std::string>>& flag_overrides,
                    const std::string& config_path, const std::string& out_dir,
                    const std::string& format) {
    RunOutputs outputs;
    nlohmann::json manifest{{"tool", "orrw"},
                            {"version", kVersion},
                            {"started", timestamp_utc()},
                            {"experiments", nlohmann::json::array()}};

    for (const std::string& name : names) {
        const orrw::ExperimentInfo* info = orrw::find_experiment(name);
        if (!info) {
            std::cerr << "error: unknown experiment '" << name << "'\n";
            return 2;
        }
        orrw::ExperimentConfig cfg = base;
        if (!config_path.empty()) orrw::ConfigFile::load(config_path).apply(cfg, name);
        for (const auto& [key, value] : flag_overrides) cfg.set(key, value);
        cfg.validate();

        std::cerr << "[orrw] running " << name << " (seed " << cfg.seed << ", reps "
                  << cfg.replications << ")\n";
        orrw::ExperimentResult result = info->run(cfg);
        write_reports(result, out_dir, format, outputs);

        nlohmann::json snap;
        for (const auto& [k, v] : cfg.snapshot()) snap[k] = v;
        nlohmann::json entry{{"name", name}, {"config", snap}};
        if (!outputs.manifest_entries.empty())
            entry["reports"] = outputs.manifest_entries.back();
        manifest["experiments"].push_back(entry);
    }

    manifest["finished"] = timestamp_utc();
    if (!out_dir.empty()) {
        std::ofstream(out_dir + "/manifest.json") << manifest.dump(2) << '\n';
        std::cerr << "[orrw] wrote " << out_dir << "/manifest.json\n";
    }
    return outputs.any_fail ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Once-reinforced walk workbench on cylinder graphs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // --- list ---------------------------------------------------------------
    auto* list_cmd = app.add_subcommand("list", "Print the experiment catalog");
    bool list_json = false;
    list_cmd->add_flag("--json", list_json, "Machine-readable catalog");

    // --- run ----------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run one or more experiments");
    std::vector<std::string> experiments;
    run_cmd->add_option("experiment", experiments, "Experiment names (see 'list')")->required();
    std::string config_path, out_dir, format = "json";
    run_cmd->add_option("--config", config_path, "INI-style config file");
    run_cmd->add_option("--out", out_dir, "Output directory (default: stdout)");
    run_cmd->add_option("--format", format, "json, csv, or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));

    std::map<std::string, std::string> flag_values;
    auto add_override = [&](const char* flag, const char* key, const char* help) {
        run_cmd->add_option_function<std::string>(
            flag, [&flag_values, key](const std::string& v) { flag_values[key] = v; }, help);
    };
    add_override("--fiber", "fiber", "point | path<m> | cycle<m> | complete<m> | file:<path>");
    add_override("--delta", "delta", "Reinforcement parameter (integer, decimal, or p/q)");
    add_override("--seed", "seed", "Base seed");
    add_override("--reps", "reps", "Replication count");
    add_override("--confidence", "confidence", "Confidence level for intervals");
    add_override("--x", "x", "Level parameter (ruin target / wall start / shape n_max)");
    add_override("--r", "r", "Far level");
    add_override("--d", "d", "Designated level count");
    add_override("--k", "k", "Local-time threshold");
    add_override("--eta", "eta", "Shunt conductance");
    add_override("--D", "D", "Wall width");
    add_override("--alpha", "alpha", "Exponent in (1/4,1/2)");
    add_override("--beta", "beta", "Exponent in (1/2,1)");
    add_override("--epsilon", "epsilon", "Refined-ruin epsilon in (0,1)");
    add_override("--horizon", "horizon", "Fixed horizon (steps)");
    add_override("--cap", "cap", "Per-replica step cap");
    add_override("--samples", "samples", "Instance count for deterministic sweeps");
    add_override("--imax", "imax", "Excursion count for return times");
    add_override("--calibrated", "calibrated", "Assert bounds at this grid point (0/1)");

    // --- replay -------------------------------------------------------------
    auto* replay_cmd = app.add_subcommand("replay", "Re-run every experiment in a manifest");
    std::string manifest_path, replay_out, replay_format = "json";
    replay_cmd->add_option("manifest", manifest_path, "manifest.json from a previous run")
        ->required();
    replay_cmd->add_option("--out", replay_out, "Output directory (default: stdout)");
    replay_cmd->add_option("--format", replay_format, "json, csv, or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));

    // --- trace --------------------------------------------------------------
    auto* trace_cmd = app.add_subcommand("trace", "Dump one walk trajectory, one step per line");
    std::string trace_fiber = "point", trace_delta = "0", trace_out;
    std::uint64_t trace_steps = 1000, trace_seed = 1;
    trace_cmd->add_option("--fiber", trace_fiber, "Fiber spec");
    trace_cmd->add_option("--delta", trace_delta, "Reinforcement parameter");
    trace_cmd->add_option("--steps", trace_steps, "Number of steps");
    trace_cmd->add_option("--seed", trace_seed, "Seed");
    trace_cmd->add_option("--out", trace_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*list_cmd) {
            if (list_json) {
                nlohmann::json catalog = nlohmann::json::array();
                for (const auto& info : orrw::experiment_catalog())
                    catalog.push_back({{"name", info.name},
                                       {"anchor", info.anchor},
                                       {"parameters", info.parameters}});
                std::cout << catalog.dump(2) << std::endl;
            } else {
                for (const auto& info : orrw::experiment_catalog()) {
                    std::cout << info.name << "\n    checks: " << info.anchor
                              << "\n    flags:  " << info.parameters << "\n";
                }
            }
            return 0;
        }

        if (*run_cmd) {
            std::vector<std::pair<std::string, std::string>> overrides(flag_values.begin(),
                                                                       flag_values.end());
            return run_experiments(experiments, orrw::ExperimentConfig{}, overrides, config_path,
                                   out_dir, format);
        }

        if (*replay_cmd) {
            std::ifstream in(manifest_path);
            if (!in) {
                std::cerr << "error: cannot open manifest " << manifest_path << "\n";
                return 2;
            }
            nlohmann::json manifest = nlohmann::json::parse(in);
            RunOutputs outputs;
            for (const auto& entry : manifest.at("experiments")) {
                std::string name = entry.at("name");
                const orrw::ExperimentInfo* info = orrw::find_experiment(name);
                if (!info) {
                    std::cerr << "error: unknown experiment '" << name << "' in manifest\n";
                    return 2;
                }
                std::map<std::string, std::string> kv;
                for (const auto& [k, v] : entry.at("config").items())
                    kv[k] = v.get<std::string>();
                orrw::ExperimentConfig cfg = orrw::ExperimentConfig::from_snapshot(kv);
                cfg.validate();
                std::cerr << "[orrw] replaying " << name << "\n";
                write_reports(info->run(cfg), replay_out, replay_format, outputs);
            }
            return outputs.any_fail ? 1 : 0;
        }

        if (*trace_cmd) {
            orrw::FiberGraph fiber = orrw::FiberGraph::from_spec(trace_fiber);
            orrw::OrrwWalker walker(fiber, orrw::Rational::parse(trace_delta), {0, 0});
            orrw::RngStream rng(trace_seed, 0);
            std::ofstream file;
            if (!trace_out.empty()) file.open(trace_out);
            std::ostream& os = trace_out.empty() ? std::cout : file;
            os << "0 0 0 0\n"; // n level fiber new_edge_flag
            for (std::uint64_t n = 0; n < trace_steps; ++n) {
                auto [edge, fresh] = walker.step(rng);
                os << walker.step_count() << ' ' << walker.position().level << ' '
                   << walker.position().fiber << ' ' << (fresh ? 1 : 0) << '\n';
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
