#pragma once

// File formats: JSON for stands, parameters, configs, schedules and
// summaries; CSV with a header row for curves, ledgers and traces. All
// numbers are written locale-independently in shortest round-trip form.

#include "fertrot/scenarios.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fertrot {

inline constexpr int kSchemaVersion = 1;

struct StandFile {
  std::string id;
  std::string provenance;
  StandState state;
};

struct RunManifest {
  std::vector<std::filesystem::path> stands;
  std::filesystem::path growth_params;
  std::filesystem::path econ_config;
  std::vector<ScenarioKind> scenarios;
  std::filesystem::path out_dir;
  unsigned long seed = 1;
  OptimizationConfig optimization;
};

/// Reads and parses a JSON file; InputError with line and column on
/// malformed text.
nlohmann::json read_json(const std::filesystem::path& path);

StandFile stand_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StandFile& stand);

GrowthParams growth_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GrowthParams& params);

EconomicConfig econ_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EconomicConfig& cfg);

Schedule schedule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Schedule& schedule);

OptimizationConfig optimization_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OptimizationConfig& opt);

/// Relative paths inside the manifest resolve against `base_dir`.
RunManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

nlohmann::json to_json(const CycleExpectation& e);
nlohmann::json to_json(const PairedDelta& d);
nlohmann::json to_json(const ScenarioResult& r);

StandFile load_stand(const std::filesystem::path& path);
GrowthParams load_growth_params(const std::filesystem::path& path);
EconomicConfig load_econ_config(const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

std::string curve_csv(const std::vector<CycleExpectation>& curve, const EconomicConfig& cfg);
std::string ledger_csv(const Ledger& ledger);
std::string trace_csv(const std::vector<SearchTraceRow>& trace);
/// Paired curves on the union of rotation ages; missing values left empty.
std::string paired_curve_csv(const std::vector<CycleExpectation>& baseline,
                             const std::vector<CycleExpectation>& fertilized, bool volume);

/// Writes through a temporary file in the same directory and renames it
/// into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fertrot
