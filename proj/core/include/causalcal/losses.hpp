#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "causalcal/data.hpp"
#include "causalcal/nuisance.hpp"
#include "causalcal/pseudo.hpp"

namespace causalcal {

enum class LossFamily { squared, pinball };

/// A loss partially evaluated at one observation and nuisance: a convex
/// function of the prediction nu.
///
///   squared: weight * 1/2 (nu - target)^2
///   pinball: weight * [scale (target - nu)(Q - 1{target <= nu}) - nu * correction]
///
/// For the pinball family `scale` is a * p(x) and the derivative uses the
/// indicator as written, so at nu = target it is the right derivative.
class BoundLoss {
 public:
  static BoundLoss squared(double target, double weight = 1.0);
  static BoundLoss pinball(double quantile, double scale, double target, double correction,
                           double weight = 1.0);

  LossFamily family() const noexcept { return family_; }
  double target() const noexcept { return target_; }
  double weight() const noexcept { return weight_; }
  double scale() const noexcept { return scale_; }
  double quantile() const noexcept { return quantile_; }
  double correction() const noexcept { return correction_; }

  double value(double nu) const;
  double derivative(double nu) const;

  BoundLoss reweighted(double factor) const;

 private:
  LossFamily family_ = LossFamily::squared;
  double target_ = 0.0;
  double weight_ = 1.0;
  double scale_ = 0.0;
  double quantile_ = 0.5;
  double correction_ = 0.0;
};

/// 1/2 (nu - chi)^2.
BoundLoss squared_pseudo_loss(double chi, double weight = 1.0);

/// a p (y - nu)(Q - 1{y <= nu}).
BoundLoss pinball_qut(double quantile, double p_val, double a, double y);

/// Corr = a p (f - Q) - f + Q.
double qut_correction(double quantile, double p_val, double f_val, double a);

/// Pinball minus nu * Corr.
BoundLoss corrected_pinball_qut(double quantile, double p_val, double f_val, double a, double y);

/// Which nuisance-dependent loss to bind.
enum class LossKind {
  cate,
  acd,
  late,
  late_iv,
  cate_plugin,
  qut_pinball,
  qut_corrected,
};

std::string_view loss_kind_name(LossKind kind);

struct LossSpec {
  LossKind kind = LossKind::cate;
  double quantile = 0.5;
  PseudoOptions pseudo;
};

/// The universally orthogonal loss for a pseudo-outcome effect, or the
/// corrected pinball loss for QUT.
LossSpec default_loss_spec(Effect effect, double quantile = 0.5);

/// l(., g; z).
BoundLoss bind_loss(const LossSpec& spec, const NuisanceSet& g, const Observation& z);

/// Strong convexity / smoothness bounds of the conditional expected loss.
struct LossProperties {
  double alpha = 0.0;
  double beta = 0.0;
  bool strongly_convex() const noexcept { return alpha > 0.0; }
};

/// Exact conditional expected loss nu -> E[l(nu, g; Z) | X = x_i] over a
/// finite covariate support.
class ConditionalLossOracle {
 public:
  virtual ~ConditionalLossOracle() = default;
  virtual std::size_t support_size() const = 0;
  virtual double expected_loss(std::size_t i, double nu) const = 0;
};

/// alpha = min and beta = max of the second divided difference over interior
/// points of a sorted grid and every support point. alpha <= 0 is reported,
/// not raised.
LossProperties measure_convexity(const ConditionalLossOracle& oracle, std::span<const double> grid);

}  // namespace causalcal
