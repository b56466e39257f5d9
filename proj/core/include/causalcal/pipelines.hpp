#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalcal/calibrators.hpp"
#include "causalcal/data.hpp"
#include "causalcal/nuisance.hpp"
#include "causalcal/predictor.hpp"
#include "causalcal/pseudo.hpp"

namespace causalcal {

struct PipelineConfig {
  Effect effect = Effect::cate;
  std::size_t folds = 5;
  CalibratorClass calibrator = CalibratorClass::isotonic;
  std::size_t bins = 20;
  NuisanceLearners learners;
  std::uint64_t seed = 0;
  LateIvSign late_iv_sign = LateIvSign::printed;
  double quantile = 0.5;
  std::optional<double> pseudo_clip;
  /// Slope added to isotonic fits in the conditional pipelines.
  double strict_slope = 1e-9;
  /// Noise bound used to separate tied UMB levels.
  double distinct_noise = 1e-9;
  bool record_timings = false;
};

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

struct CalibrationResult {
  CalibratorModel model;
  nlohmann::ordered_json report = nlohmann::ordered_json::object();
};

/// Sample splitting for universally orthogonal losses: nuisances on the
/// first (larger) half of a shuffled split, pseudo-outcomes and the
/// calibrator on the second half.
CalibrationResult calibrate_universal_split(const Dataset& data, std::span<const double> base_preds,
                                            const PipelineConfig& cfg);

/// Cross calibration: out-of-fold pseudo-outcomes on all rows, one calibrator.
CalibrationResult calibrate_universal_cross(const Dataset& data, std::span<const double> base_preds,
                                            const PipelineConfig& cfg);

/// Out-of-fold pseudo-outcomes for reuse by several calibrators.
PseudoBatch cross_pseudo_outcomes(const Dataset& data, std::span<const double> base_preds,
                                  const PipelineConfig& cfg, FoldAssignment* folds_out = nullptr);

/// Fits the configured universal calibrator class to pseudo-outcomes.
CalibratorModel fit_universal_calibrator(std::span<const PseudoSample> pseudo,
                                         const PipelineConfig& cfg);

/// Sample splitting for the conditionally orthogonal QUT loss: (p, f) on the
/// first half, corrected pinball losses and ERM on the second.
CalibrationResult calibrate_conditional_split(const Dataset& data, std::span<const double> base_preds,
                                              const PipelineConfig& cfg);

/// Cross calibration for the QUT loss: out-of-fold (p, f), ERM on all rows.
CalibrationResult calibrate_conditional_cross(const Dataset& data, std::span<const double> base_preds,
                                              const PipelineConfig& cfg);

/// Three-way uniform mass binning: edges from the first third, nuisances
/// from the second with bucket membership fixed, per-bucket minimizers on
/// the third. Supports QUT (corrected pinball) and universal effects
/// (squared loss on pseudo-outcomes).
CalibrationResult three_way_umb(const Dataset& data, std::span<const double> base_preds,
                                const PipelineConfig& cfg);

/// Convenience overloads evaluating `base` on every row.
CalibrationResult calibrate_universal_split(const Dataset& data, const Predictor& base,
                                            const PipelineConfig& cfg);
CalibrationResult calibrate_universal_cross(const Dataset& data, const Predictor& base,
                                            const PipelineConfig& cfg);
CalibrationResult calibrate_conditional_split(const Dataset& data, const Predictor& base,
                                              const PipelineConfig& cfg);
CalibrationResult calibrate_conditional_cross(const Dataset& data, const Predictor& base,
                                              const PipelineConfig& cfg);
CalibrationResult three_way_umb(const Dataset& data, const Predictor& base,
                                const PipelineConfig& cfg);

/// Bound corrected-pinball losses for QUT rows from per-row (p, f) values.
std::vector<LossPoint> qut_loss_points(const Dataset& data, std::span<const double> base_preds,
                                       std::span<const double> p, std::span<const double> f,
                                       double quantile);

}  // namespace causalcal
