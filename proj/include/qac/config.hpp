#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "qac/dynamics.hpp"

namespace qac {

struct SweepSpec {
    SweepControl control = SweepControl::Epsilon;
    std::vector<double> values;  // explicit list, or expanded from lo/hi/n
};

/// One batch run: model + cavity + schedule, optional sweep, output selection.
struct RunConfig {
    ModelSpec model;
    std::string instance_file;  // EC: clause file (resolved against the config dir)
    std::string clauses_text;   // EC: inline clause list
    CavityParams cavity;
    Schedule schedule;
    std::optional<SweepSpec> sweep;
    std::string output_dir = "out";
    std::set<std::string> emit;  // sweep, bifurcations, trajectory, protocol, observables
    int workers = 0;             // 0 = hardware concurrency
    int analyze_n = 401;         // field grid for observables.csv
};

/// Parse the JSON document; relative instance paths resolve against base_dir.
/// Malformed documents raise ParseError.
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

/// Materialize the configured model (loads/parses/generates EC instances).
Model build_config_model(const RunConfig& config);

std::string to_string(SweepControl control);
std::string to_string(ModelKind kind);

}  // namespace qac
