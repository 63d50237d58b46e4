// lab: experiment runner for the torus control/fluid laboratory.
//
//   lab list
//   lab run <experiment> [--config file.json] [--seed S] [--out DIR] [flags]
//   lab verify-all [--seed S] [--out DIR] [--jobs N]
//
// Flags after `run` override the config file; unknown parameter names are
// rejected with the offending key.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sdifflab/experiments.hpp"
#include "sdifflab/version.hpp"

using namespace sdifflab;
using nlohmann::json;

namespace {

void print_report(const Report& rep) {
    std::cout << rep.experiment << ": " << (rep.pass() ? "PASS" : "FAIL") << "  ("
              << rep.runtime_seconds << " s)\n";
    for (const auto& c : rep.checks) {
        std::cout << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  " << c.measured
                  << " " << c.comparator << " " << c.tolerance << "\n";
        if (!c.pass) std::cout << "        " << c.detail << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for incompressible flow, optimal control and "
                 "stochastic flows on flat tori"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list experiments with one-line descriptions");

    std::string run_name, config_path, out_dir;
    uint64_t seed = 12345;
    int jobs = 0;
    std::map<std::string, double> num_flags;
    auto* run_cmd = app.add_subcommand("run", "run one experiment and print its report");
    run_cmd->add_option("experiment", run_name, "experiment name (see: lab list)")->required();
    run_cmd->add_option("--config", config_path, "JSON config file");
    run_cmd->add_option("--seed", seed, "random seed");
    run_cmd->add_option("--out", out_dir, "directory for the JSON report and CSV tables");
    run_cmd->add_option("--jobs", jobs, "worker threads (0 = hardware)");
    // numeric parameter overrides, forwarded into params untouched; the
    // generator window h is spelled --window ("-h" is help)
    std::vector<std::pair<std::string, std::string>> overrides;
    struct FlagKey {
        const char* flag;
        const char* key;
    };
    for (FlagKey fk : std::initializer_list<FlagKey>{
             {"nu", "nu"}, {"dt", "dt"}, {"T", "T"}, {"K", "K"}, {"paths", "paths"},
             {"steps", "steps"}, {"eps", "eps"}, {"window", "h"}, {"K_min", "K_min"},
             {"K_max", "K_max"}, {"points", "points"}, {"perturbations", "perturbations"},
             {"particles_per_axis", "particles_per_axis"}, {"sweep_paths", "sweep_paths"},
             {"lie_hodge_K", "lie_hodge_K"}, {"lie_hodge_fields", "lie_hodge_fields"}}) {
        const char* key = fk.key;
        run_cmd->add_option_function<double>(
            std::string("--") + fk.flag,
            [key, &overrides](double v) { overrides.emplace_back(key, std::to_string(v)); },
            std::string("override parameter ") + key);
    }

    std::string psi_spec, v_spec;
    run_cmd->add_option("--psi-spec", psi_spec,
                        "terminal cost as an inline JSON mode list, e.g. "
                        "'{\"dim\":1,\"modes\":[{\"k\":[1],\"parity\":\"cos\",\"coeff\":0.1}]}'");
    run_cmd->add_option("--v-spec", v_spec, "potential as an inline JSON mode list");

    std::string all_out;
    uint64_t all_seed = 12345;
    int all_jobs = 0;
    auto* all_cmd = app.add_subcommand("verify-all", "run every experiment and aggregate");
    all_cmd->add_option("--seed", all_seed, "random seed");
    all_cmd->add_option("--out", all_out, "directory for all reports");
    all_cmd->add_option("--jobs", all_jobs, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list_cmd) {
            for (const auto& e : experiment_registry())
                std::cout << e.name << "\n    " << e.description << "\n";
            return 0;
        }
        if (*run_cmd) {
            json j;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in.good()) {
                    std::cerr << "cannot open config file " << config_path << "\n";
                    return 2;
                }
                try {
                    j = json::parse(in);
                } catch (const json::parse_error& e) {
                    std::cerr << "config parse error in " << config_path << ": " << e.what()
                              << "\n";
                    return 2;
                }
            }
            j["experiment"] = run_name;
            if (run_cmd->count("--seed")) j["seed"] = seed;
            if (!out_dir.empty()) j["out_dir"] = out_dir;
            if (jobs != 0) j["jobs"] = jobs;
            if (!j.contains("params")) j["params"] = json::object();
            if (!psi_spec.empty()) j["params"]["psi_spec"] = json::parse(psi_spec);
            if (!v_spec.empty()) j["params"]["v_spec"] = json::parse(v_spec);
            for (const auto& [k, v] : overrides) {
                // integers stay integers so param_int round trips
                const double d = std::stod(v);
                if (d == std::floor(d) && std::abs(d) < 1e15)
                    j["params"][k] = static_cast<long long>(d);
                else
                    j["params"][k] = d;
            }
            ExperimentConfig cfg = ExperimentConfig::from_json(j);
            Report rep = run_experiment(cfg);
            print_report(rep);
            return rep.pass() ? 0 : 1;
        }
        // verify-all
        SuiteReport suite = verify_all(all_seed, all_out, all_jobs);
        for (const auto& rep : suite.reports) print_report(rep);
        std::cout << (suite.pass() ? "ALL PASS" : "FAILURES PRESENT") << "\n";
        if (!all_out.empty()) {
            std::ofstream out(all_out + "/verify-all.report.json");
            out << suite.to_json().dump(2) << "\n";
        }
        return suite.pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
