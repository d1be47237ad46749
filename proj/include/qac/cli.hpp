#pragma once

#include <iostream>

#include "qac/emit.hpp"

namespace qac {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;      // config/parse errors
inline constexpr int kExitEmpty = 2;       // empty analytical result
inline constexpr int kExitIntegration = 3; // integration failure

/// Stationary sweep: sweep.csv + bifurcations.json.
int cmd_stationary(const RunConfig& config, std::ostream& log = std::cerr);

/// Protocol run(s): trajectory.csv + protocol.json for a single run;
/// protocols.json + summary.csv for a sweep over the mid level.
int cmd_protocol(const RunConfig& config, std::ostream& log = std::cerr);

/// Field-grid observables (observables.csv) + feasibility.json.
int cmd_analyze(const RunConfig& config, std::ostream& log = std::cerr);

struct EcCommandOptions {
    std::string instance_path;  // mutually exclusive with generate
    bool generate = false;
    int n_qubits = 0;
    int n_clauses = 0;
    std::uint64_t seed = 0;
    bool unique = false;
    double b_x = 0.5;
    double j0 = 0.25;
    std::string out_dir;  // when set, also writes instance.txt + ec.json
};

/// Instance inspection: solutions, violation histogram, gap location.
int cmd_ec(const EcCommandOptions& options, std::ostream& out = std::cout,
           std::ostream& log = std::cerr);

/// Preset lookup order: $QAC_PRESET_DIR, ./presets, <exe>/presets,
/// <exe>/../presets. Throws ParseError when the name resolves nowhere.
std::filesystem::path find_preset(const std::string& name,
                                  const std::string& exe_dir = "");

}  // namespace qac
