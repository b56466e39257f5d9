#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalcal/losses.hpp"
#include "causalcal/pseudo.hpp"
#include "causalcal/rng.hpp"

namespace causalcal {

enum class CalibratorClass { isotonic, binning, linear, platt };

std::string_view calibrator_class_name(CalibratorClass cls);
CalibratorClass parse_calibrator_class(std::string_view name);

/// Step function: level[i] applies on [breakpoints[i], breakpoints[i+1]).
/// Predictions below breakpoints[0] take levels[0]. With strict_slope > 0 the
/// released map is level + strict_slope * pred.
struct IsotonicParams {
  std::vector<double> breakpoints;
  std::vector<double> levels;
  double strict_slope = 0.0;
};

/// Buckets (-inf, e0), [e0, e1), ..., [e_{B-2}, +inf) over interior edges e.
struct BinningParams {
  std::vector<double> edges;
  std::vector<double> levels;
};

struct LinearParams {
  double slope = 1.0;
  double intercept = 0.0;
};

/// tau(x) = 1 / (1 + exp(a x + b)).
struct PlattParams {
  double a = 0.0;
  double b = 0.0;
};

struct ModelMeta {
  std::size_t merged_buckets = 0;
  std::vector<std::string> flags;
  /// Free-form provenance (effect, quantile, evaluation edges, digests).
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool has_flag(std::string_view flag) const;
  void add_flag(std::string flag);
};

/// A fitted post-processing map tau from base predictions to calibrated ones.
class CalibratorModel {
 public:
  using Params = std::variant<IsotonicParams, BinningParams, LinearParams, PlattParams>;

  CalibratorModel() = default;
  explicit CalibratorModel(Params params, ModelMeta meta = {});

  CalibratorClass cls() const noexcept;
  const Params& params() const noexcept { return params_; }
  const ModelMeta& meta() const noexcept { return meta_; }
  ModelMeta& meta() noexcept { return meta_; }

  double apply(double pred) const;
  std::vector<double> apply(std::span<const double> preds) const;

  /// True when pred lies below the isotonic fit's training range.
  bool below_training_range(double pred) const;

  template <class T>
  const T& as() const { return std::get<T>(params_); }

 private:
  Params params_ = LinearParams{};
  ModelMeta meta_;
};

struct WeightedPoint {
  double pred = 0.0;
  double target = 0.0;
  double weight = 1.0;
};

/// Exact weighted least-squares isotonic regression of target on pred.
/// Tied preds are pooled first. Requires a nonempty input with weights > 0.
CalibratorModel pava(std::vector<WeightedPoint> points);

/// Adds strict_slope * pred to an isotonic map so that it is injective.
CalibratorModel make_strict(const CalibratorModel& model, double strict_slope);

struct UmbEdges {
  std::vector<double> edges;
  std::size_t requested_bins = 0;
  std::size_t merged = 0;
  std::size_t bins() const noexcept { return edges.size() + 1; }
};

/// Uniform-mass edges e_b = sorted[floor(b n / B)], b = 1..B-1 (0-based order
/// statistics), outer edges -inf/+inf. Duplicate edges and edges equal to the
/// minimum prediction are merged away and counted in `merged`.
UmbEdges umb_edges(std::span<const double> preds, std::size_t bins);

/// Bucket index of pred under interior edges (left-closed buckets).
std::size_t bucket_of(std::span<const double> edges, double pred);

/// Histogram binning: uniform-mass edges on the preds, level = weighted mean chi.
CalibratorModel binning_fit(std::span<const PseudoSample> pseudo, std::size_t bins);

/// Binning with fixed edges. Empty buckets inherit the nearest nonempty
/// bucket's level (left neighbor on ties) and set the "empty_bucket_inherited" flag.
CalibratorModel binning_fit_with_edges(std::span<const PseudoSample> pseudo,
                                       std::span<const double> edges);

/// Weighted least squares chi ~ slope * pred + intercept.
CalibratorModel linear_fit(std::span<const PseudoSample> pseudo);

/// Log-loss Platt scaling with 1e-6 ridge on (a, b), damped Newton.
CalibratorModel platt_fit(std::span<const PseudoSample> pseudo);

inline constexpr double kPlattRegularization = 1e-6;

/// Regularized Platt objective, exposed for test oracles.
double platt_objective(std::span<const PseudoSample> pseudo, double a, double b);

struct LossPoint {
  double pred = 0.0;
  BoundLoss loss;
};

struct ErmClass {
  CalibratorClass cls = CalibratorClass::linear;
  std::size_t bins = 10;
};

/// argmin over the class of sum_i l_i(tau(pred_i)).
///   squared family: binning -> binning_fit, linear -> linear_fit, isotonic -> pava
///   pinball family: binning -> per-bucket bucket_minimize, linear -> exact inner
///                   minimization over the intercept with golden-section search
///                   over the slope, isotonic -> pool-adjacent-violators with
///                   bucket_minimize as the block solver
/// Platt, or mixed families, raise invalid-argument.
CalibratorModel erm_calibrate(std::span<const LossPoint> points, const ErmClass& cls);

/// Empirical objective sum_i l_i(model.apply(pred_i)).
double erm_objective(std::span<const LossPoint> points, const CalibratorModel& model);

/// Smallest exact minimizer of nu -> sum_i l_i(nu). Throws
/// unbounded-objective when the sum has no minimizer.
double bucket_minimize(std::span<const BoundLoss> losses);

/// Smallest minimizer of b -> sum_i l_i(offsets[i] + b) and its value.
struct ShiftedMinimum {
  double argmin = 0.0;
  double value = 0.0;
};
ShiftedMinimum minimize_shifted(std::span<const BoundLoss> losses, std::span<const double> offsets);

/// Adds U[-noise, noise] to later duplicates until all levels are pairwise
/// distinct. Returns the input unchanged when it is already distinct or
/// noise is zero.
std::vector<double> ensure_distinct_levels(std::vector<double> levels, double noise,
                                           const SeedStream& seed);

}  // namespace causalcal
