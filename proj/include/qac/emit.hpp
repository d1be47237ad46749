#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qac/config.hpp"

namespace qac {

/// 12-significant-digit rendering used for every numeric output.
std::string format_sig(double v);

/// Round to 12 significant digits (applied to JSON payloads so the files obey
/// the same precision contract as the CSVs).
double round_sig(double v);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

void write_bifurcations_json(const std::filesystem::path& path,
                             const std::vector<BifurcationPoint>& points);

void write_observables_csv(const std::filesystem::path& path,
                           const std::vector<GroundObservables>& rows);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

nlohmann::json protocol_json(const ProtocolResult& result, SweepControl control);

nlohmann::json feasibility_json(const FeasibilityReport& report);

void write_protocol_summary_csv(const std::filesystem::path& path,
                                const std::vector<ProtocolResult>& results,
                                SweepControl control);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace qac
