#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sdifflab {

/// One named verification: measured value against a pinned tolerance.
/// comparator is "<=" or ">=" (measured vs tolerance).
struct CheckResult {
    std::string name;
    std::string detail;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string comparator = "<=";
    bool pass = false;
};

CheckResult check_le(std::string name, std::string detail, double measured, double tolerance);
CheckResult check_ge(std::string name, std::string detail, double measured, double tolerance);

struct Report {
    std::string experiment;
    nlohmann::json config;  // full echo, defaults filled in
    std::string tool_version;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> tables;  // (file stem, CSV text)
    double runtime_seconds = 0.0;

    bool pass() const;
    nlohmann::json to_json() const;
    /// Writes <experiment>.report.json plus one CSV per table into dir.
    void write(const std::string& dir) const;
};

struct ExperimentConfig {
    std::string experiment;
    uint64_t seed = 12345;
    std::string out_dir;  // empty: no files written
    int jobs = 0;         // 0 = hardware concurrency
    nlohmann::json params = nlohmann::json::object();

    /// Parses {"experiment":..., "seed":..., "out_dir":..., "jobs":...,
    /// "params":{...}}; unknown keys are an error with the key named.
    static ExperimentConfig from_json(const nlohmann::json& j);

    /// Rejects unknown parameter keys against the experiment's schema.
    void require_param_keys(const std::vector<std::string>& allowed) const;

    double param(const std::string& key, double fallback) const;
    int param_int(const std::string& key, int fallback) const;
    nlohmann::json param_json(const std::string& key) const;  // null if absent
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::function<Report(const ExperimentConfig&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();
std::vector<std::string> list_experiments();

/// Runs one experiment; throws std::invalid_argument for unknown names.
Report run_experiment(const ExperimentConfig& cfg);

struct SuiteReport {
    std::vector<Report> reports;
    bool pass() const;
    nlohmann::json to_json() const;
};

/// Runs every registered experiment with defaults and the given seed.
SuiteReport verify_all(uint64_t seed, const std::string& out_dir = "", int jobs = 0);

}  // namespace sdifflab
