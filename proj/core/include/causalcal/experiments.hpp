#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalcal/calibrators.hpp"
#include "causalcal/data.hpp"
#include "causalcal/metrics.hpp"
#include "causalcal/nuisance.hpp"
#include "causalcal/synth.hpp"

namespace causalcal {

enum class ExperimentScale { smoke, acceptance, paper };

std::string_view scale_name(ExperimentScale scale);
ExperimentScale parse_scale(std::string_view name);

struct QuantileExperimentConfig {
  std::vector<std::size_t> sizes{1000};
  std::vector<double> quantiles{0.6, 0.75, 0.9};
  std::size_t reps = 20;
  std::size_t folds = 5;
  std::size_t test_size = 2000;
  std::size_t eval_bins = 4;
  /// Base model: boosted pinball trees.
  TreeParams base_trees{3, 100, 0.1, 10, 1.0};
  /// Propensity and auxiliary classifiers.
  Learner classifier{LearnerKind::boosted_classification_trees, TreeParams{2, 50, 0.1, 10, 1.0}, 1.0, 0.05};
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  static QuantileExperimentConfig for_scale(ExperimentScale scale);
};

struct QuantileRow {
  std::size_t n = 0;
  double quantile = 0.0;
  std::size_t rep = 0;
  std::string status = "ok";
  std::string error;
  double pre_cal_error = 0.0;
  double post_cal_error = 0.0;
  double pre_loss = 0.0;
  double post_loss = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
};

struct QuantileSummary {
  std::size_t n = 0;
  double quantile = 0.0;
  std::size_t ok_reps = 0;
  std::size_t failed_reps = 0;
  MeanBand pre_cal;
  MeanBand post_cal;
  MeanBand pre_loss;
  MeanBand post_loss;
  /// One-sided paired z statistic for pre - post calibration error.
  double paired_z = 0.0;
  /// post_loss mean / pre_loss mean - 1.
  double relative_loss_change = 0.0;
};

struct QuantileExperimentResult {
  std::vector<QuantileRow> rows;
  std::vector<QuantileSummary> summaries;
};

QuantileExperimentResult run_quantile_experiment(const QuantileExperimentConfig& cfg);

/// One replicate: base fit on n rows, cross-fitted linear ERM calibration on n
/// fresh rows, evaluation on a held-out sample with true nuisances.
QuantileRow run_quantile_rep(const QutDgp& dgp, std::size_t n, double quantile, std::size_t rep,
                             const QuantileExperimentConfig& cfg);

struct CateExperimentConfig {
  std::size_t reps = 50;
  std::size_t n = 2000;
  double train_fraction = 0.60;
  double calib_fraction = 0.25;
  std::size_t folds = 5;
  std::size_t binning_bins = 20;
  /// Base predictions are scale * fitted + shift.
  double bias_scale = 1.6;
  double bias_shift = 0.5;
  SyntheticCateDgp dgp;
  /// When set, every replicate re-splits this dataset instead of sampling.
  std::optional<Dataset> data;
  Learner outcome{LearnerKind::boosted_regression_trees, TreeParams{3, 60, 0.1, 10, 1.0}, 1.0, 0.05};
  Learner propensity{LearnerKind::boosted_classification_trees, TreeParams{2, 40, 0.1, 10, 1.0}, 1.0, 0.05};
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  static CateExperimentConfig for_scale(ExperimentScale scale);
};

struct CateRow {
  std::size_t rep = 0;
  std::string calibrator;
  std::string status = "ok";
  std::string error;
  double cal_error = 0.0;
};

struct CateExperimentResult {
  std::vector<CateRow> rows;
  /// Keyed by calibrator name ("uncalibrated", "isotonic", "binning", "linear").
  std::vector<std::pair<std::string, BoxSummary>> summaries;
};

CateExperimentResult run_cate_experiment(const CateExperimentConfig& cfg);

std::string quantile_rows_csv(const QuantileExperimentResult& result);
nlohmann::ordered_json quantile_summary_json(const QuantileExperimentResult& result,
                                             const QuantileExperimentConfig& cfg);
std::string cate_rows_csv(const CateExperimentResult& result);
nlohmann::ordered_json cate_summary_json(const CateExperimentResult& result,
                                         const CateExperimentConfig& cfg);

}  // namespace causalcal
