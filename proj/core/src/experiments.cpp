#include "sdifflab/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "sdifflab/version.hpp"

namespace sdifflab {

using nlohmann::json;

CheckResult check_le(std::string name, std::string detail, double measured, double tolerance) {
    CheckResult c;
    c.name = std::move(name);
    c.detail = std::move(detail);
    c.measured = measured;
    c.tolerance = tolerance;
    c.comparator = "<=";
    c.pass = measured <= tolerance;
    return c;
}

CheckResult check_ge(std::string name, std::string detail, double measured, double tolerance) {
    CheckResult c;
    c.name = std::move(name);
    c.detail = std::move(detail);
    c.measured = measured;
    c.tolerance = tolerance;
    c.comparator = ">=";
    c.pass = measured >= tolerance;
    return c;
}

bool Report::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

json Report::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["tool_version"] = tool_version;
    j["config"] = config;
    j["pass"] = pass();
    j["runtime_seconds"] = runtime_seconds;
    json cs = json::array();
    for (const auto& c : checks) {
        cs.push_back({{"name", c.name},
                      {"detail", c.detail},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"comparator", c.comparator},
                      {"pass", c.pass}});
    }
    j["checks"] = std::move(cs);
    return j;
}

void Report::write(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / (experiment + ".report.json"));
        out << to_json().dump(2) << "\n";
    }
    for (const auto& [stem, text] : tables) {
        // entries named *.json carry serialized fields, everything else is CSV
        const bool is_json = stem.size() > 5 && stem.substr(stem.size() - 5) == ".json";
        std::ofstream out(fs::path(dir) / (experiment + "." + stem + (is_json ? "" : ".csv")));
        out << text;
    }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    static const std::vector<std::string> allowed{"experiment", "seed", "out_dir", "jobs",
                                                  "params"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("config: unknown key \"" + it.key() + "\"");
    }
    ExperimentConfig cfg;
    cfg.experiment = j.value("experiment", "");
    cfg.seed = j.value("seed", uint64_t{12345});
    cfg.out_dir = j.value("out_dir", "");
    cfg.jobs = j.value("jobs", 0);
    if (j.contains("params")) {
        if (!j.at("params").is_object())
            throw std::invalid_argument("config: params must be an object");
        cfg.params = j.at("params");
    }
    return cfg;
}

void ExperimentConfig::require_param_keys(const std::vector<std::string>& allowed) const {
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("config: unknown parameter \"" + it.key() +
                                        "\" for experiment " + experiment);
    }
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
    if (!params.contains(key)) return fallback;
    return params.at(key).get<double>();
}

int ExperimentConfig::param_int(const std::string& key, int fallback) const {
    if (!params.contains(key)) return fallback;
    return params.at(key).get<int>();
}

nlohmann::json ExperimentConfig::param_json(const std::string& key) const {
    if (!params.contains(key)) return nullptr;
    return params.at(key);
}

std::vector<std::string> list_experiments() {
    std::vector<std::string> names;
    for (const auto& e : experiment_registry()) names.push_back(e.name);
    return names;
}

Report run_experiment(const ExperimentConfig& cfg) {
    for (const auto& e : experiment_registry()) {
        if (e.name == cfg.experiment) {
            const auto start = std::chrono::steady_clock::now();
            Report rep = e.run(cfg);
            rep.experiment = cfg.experiment;
            rep.tool_version = kVersion;
            rep.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (!cfg.out_dir.empty()) rep.write(cfg.out_dir);
            return rep;
        }
    }
    throw std::invalid_argument("unknown experiment \"" + cfg.experiment + "\" (see: lab list)");
}

bool SuiteReport::pass() const {
    for (const auto& r : reports)
        if (!r.pass()) return false;
    return true;
}

json SuiteReport::to_json() const {
    json j;
    j["tool_version"] = kVersion;
    j["pass"] = pass();
    json rs = json::array();
    for (const auto& r : reports) rs.push_back(r.to_json());
    j["experiments"] = std::move(rs);
    return j;
}

SuiteReport verify_all(uint64_t seed, const std::string& out_dir, int jobs) {
    SuiteReport suite;
    for (const auto& e : experiment_registry()) {
        ExperimentConfig cfg;
        cfg.experiment = e.name;
        cfg.seed = seed;
        cfg.out_dir = out_dir;
        cfg.jobs = jobs;
        suite.reports.push_back(run_experiment(cfg));
    }
    return suite;
}

}  // namespace sdifflab
