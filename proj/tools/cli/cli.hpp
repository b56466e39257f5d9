#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalcal/data.hpp"
#include "causalcal/pipelines.hpp"

namespace causalcal::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Column roles for a CSV file.
struct DataConfig {
  std::vector<std::string> covariates;
  std::string treatment = "a";
  std::string outcome = "y";
  std::optional<std::string> instrument;
  std::optional<std::string> base_prediction;
  /// Precomputed pseudo-outcomes, used by `evaluate` instead of cross-fitting.
  std::optional<std::string> pseudo_outcome;
  TreatmentKind treatment_kind = TreatmentKind::binary;
};

DataConfig parse_data_config(const nlohmann::json& j);
nlohmann::ordered_json data_config_to_json(const DataConfig& cfg);

struct IngestResult {
  Dataset data;
  std::optional<std::vector<double>> pseudo_outcomes;
};

IngestResult ingest_csv_text(const std::string& text, const DataConfig& cfg);
IngestResult ingest_csv(const std::filesystem::path& path, const DataConfig& cfg);

enum class CalibrationMode { split, cross, umb3 };

/// Pipeline settings from the "pipeline" object of a config file.
struct RunConfig {
  PipelineConfig pipeline;
  std::optional<Effect> effect;
  std::optional<double> quantile;
  std::optional<double> known_pi0;
  CalibrationMode mode = CalibrationMode::cross;
};

RunConfig parse_run_config(const nlohmann::json& j);
Learner parse_learner(const nlohmann::json& j, Learner defaults);

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 runtime error, 2 usage error. Errors are written to `err`
/// as {"error": {"category", "message"}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causalcal::cli
