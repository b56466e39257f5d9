#include "causalcal/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalcal/error.hpp"

namespace causalcal {

BoundLoss BoundLoss::squared(double target, double weight) {
  if (!std::isfinite(target)) throw Error(ErrorCategory::invalid_argument, "non-finite loss target");
  BoundLoss l;
  l.family_ = LossFamily::squared;
  l.target_ = target;
  l.weight_ = weight;
  return l;
}

BoundLoss BoundLoss::pinball(double quantile, double scale, double target, double correction,
                             double weight) {
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw Error(ErrorCategory::invalid_argument, "quantile must lie in (0, 1)");
  }
  if (!std::isfinite(target) || !std::isfinite(scale) || !std::isfinite(correction)) {
    throw Error(ErrorCategory::invalid_argument, "non-finite pinball parameters");
  }
  if (scale < 0.0) throw Error(ErrorCategory::invalid_argument, "pinball scale must be nonnegative");
  BoundLoss l;
  l.family_ = LossFamily::pinball;
  l.quantile_ = quantile;
  l.scale_ = scale;
  l.target_ = target;
  l.correction_ = correction;
  l.weight_ = weight;
  return l;
}

double BoundLoss::value(double nu) const {
  if (family_ == LossFamily::squared) {
    const double r = nu - target_;
    return weight_ * 0.5 * r * r;
  }
  const double ind = target_ <= nu ? 1.0 : 0.0;
  return weight_ * (scale_ * (target_ - nu) * (quantile_ - ind) - nu * correction_);
}

double BoundLoss::derivative(double nu) const {
  if (family_ == LossFamily::squared) return weight_ * (nu - target_);
  const double ind = target_ <= nu ? 1.0 : 0.0;
  return weight_ * (-scale_ * (quantile_ - ind) - correction_);
}

BoundLoss BoundLoss::reweighted(double factor) const {
  BoundLoss l = *this;
  l.weight_ *= factor;
  return l;
}

BoundLoss squared_pseudo_loss(double chi, double weight) { return BoundLoss::squared(chi, weight); }

BoundLoss pinball_qut(double quantile, double p_val, double a, double y) {
  return BoundLoss::pinball(quantile, a * p_val, y, 0.0);
}

double qut_correction(double quantile, double p_val, double f_val, double a) {
  return a * p_val * (f_val - quantile) - f_val + quantile;
}

BoundLoss corrected_pinball_qut(double quantile, double p_val, double f_val, double a, double y) {
  return BoundLoss::pinball(quantile, a * p_val, y, qut_correction(quantile, p_val, f_val, a));
}

std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::cate: return "cate";
    case LossKind::acd: return "acd";
    case LossKind::late: return "late";
    case LossKind::late_iv: return "late-iv";
    case LossKind::cate_plugin: return "cate-plugin";
    case LossKind::qut_pinball: return "qut-pinball";
    case LossKind::qut_corrected: return "qut-corrected";
  }
  return "unknown";
}

LossSpec default_loss_spec(Effect effect, double quantile) {
  LossSpec s;
  s.quantile = quantile;
  switch (effect) {
    case Effect::cate: s.kind = LossKind::cate; break;
    case Effect::acd: s.kind = LossKind::acd; break;
    case Effect::late_known_pi: s.kind = LossKind::late; break;
    case Effect::late_iv: s.kind = LossKind::late_iv; break;
    case Effect::qut: s.kind = LossKind::qut_corrected; break;
  }
  return s;
}

BoundLoss bind_loss(const LossSpec& spec, const NuisanceSet& g, const Observation& z) {
  switch (spec.kind) {
    case LossKind::cate: return squared_pseudo_loss(chi_cate(g, z));
    case LossKind::acd: return squared_pseudo_loss(chi_acd(g, z));
    case LossKind::late: return squared_pseudo_loss(chi_late(g, z));
    case LossKind::late_iv: return squared_pseudo_loss(chi_late_iv(g, z, spec.pseudo.late_iv_sign));
    case LossKind::cate_plugin: return squared_pseudo_loss(chi_cate_plugin(g, z));
    case LossKind::qut_pinball: return pinball_qut(spec.quantile, g.at("p")(z.x), z.a, z.y);
    case LossKind::qut_corrected:
      return corrected_pinball_qut(spec.quantile, g.at("p")(z.x), g.at("f")(z.x), z.a, z.y);
  }
  throw Error(ErrorCategory::invalid_argument, "unknown loss kind");
}

LossProperties measure_convexity(const ConditionalLossOracle& oracle, std::span<const double> grid) {
  if (grid.size() < 3) throw Error(ErrorCategory::invalid_argument, "convexity grid needs 3 points");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(ErrorCategory::invalid_argument, "grid must be increasing");
  }
  LossProperties out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < oracle.support_size(); ++i) {
    std::vector<double> f(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) f[k] = oracle.expected_loss(i, grid[k]);
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
      const double hl = grid[k] - grid[k - 1];
      const double hr = grid[k + 1] - grid[k];
      const double d2 = 2.0 * ((f[k + 1] - f[k]) / hr - (f[k] - f[k - 1]) / hl) / (hl + hr);
      out.alpha = std::min(out.alpha, d2);
      out.beta = std::max(out.beta, d2);
    }
  }
  return out;
}

}  // namespace causalcal
