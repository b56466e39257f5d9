#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "causalcal/losses.hpp"
#include "causalcal/nuisance.hpp"
#include "causalcal/oracle.hpp"
#include "causalcal/predictor.hpp"
#include "causalcal/pseudo.hpp"

namespace causalcal {

/// Quartile-style evaluation edges from calibration-set predictions:
/// e_i = s_(floor(i N / B)) for i = 1..B-1 with 1-based order statistics
/// (s_(0) = -inf). Buckets are right-closed: (e_{i-1}, e_i].
std::vector<double> evaluation_edges(std::span<const double> calibration_preds, std::size_t bins = 4);

/// Index of the right-closed bucket containing pred.
std::size_t evaluation_bucket(std::span<const double> edges, double pred);

struct BinnedBucket {
  std::size_t count = 0;
  double mean_pred = 0.0;
  /// Mean pseudo-outcome, or for QUT the a*p-weighted exceedance frequency.
  double mean_target = 0.0;
  /// Quantity whose square enters the estimate (mean_target - mean_pred for
  /// pseudo-outcomes; mean of a p (1{y <= pred} - Q) for QUT).
  double gap = 0.0;
};

struct BinnedCalReport {
  std::vector<double> edges;
  std::vector<BinnedBucket> buckets;
  std::size_t empty_buckets = 0;
  /// (1 / nonempty) * sum over nonempty buckets of gap^2.
  double estimate = 0.0;
  std::vector<std::string> flags;
};

/// Binned L2 calibration error of model predictions against test
/// pseudo-outcomes. `samples[i].base_pred` holds the evaluated model's
/// prediction. Throws evaluation-error when every bucket is empty.
BinnedCalReport binned_cal_error(std::span<const PseudoSample> samples, std::span<const double> edges);

/// QUT variant: per bucket, mean of a p (1{y <= pred} - Q).
struct QutEvalPoint {
  double pred = 0.0;
  double a = 0.0;
  double y = 0.0;
  double p = 1.0;
};
BinnedCalReport binned_qut_error(std::span<const QutEvalPoint> points, std::span<const double> edges,
                                 double quantile);

/// E[dl(theta, g; Z) | X = x_i] for every support point.
std::vector<double> conditional_scores(const DiscreteOracle& oracle, std::span<const double> theta,
                                       const LossSpec& spec, const NuisanceSet& g);

/// Exact L2 calibration error sqrt(sum_levels P(level) E[dl | level]^2).
double exact_cal_error(const DiscreteOracle& oracle, const Predictor& theta, const LossSpec& spec,
                       const NuisanceSet& g);
double exact_cal_error(const DiscreteOracle& oracle, std::span<const double> theta_values,
                       const LossSpec& spec, const NuisanceSet& g);

/// theta_0(x_i) = smallest argmin_nu E[l(nu, g; Z) | X = x_i].
std::vector<double> conditional_minimizer(const DiscreteOracle& oracle, const LossSpec& spec,
                                          const NuisanceSet& g);

/// gamma_theta(x_i; g): the minimizer of the loss pooled over theta's level set.
std::vector<double> calibration_function(const DiscreteOracle& oracle,
                                         std::span<const double> theta_values, const LossSpec& spec,
                                         const NuisanceSet& g);

/// Canonical (eta, zeta) pair at w for the effect's score representation.
struct CanonicalPair {
  double eta = 0.0;
  double zeta = 0.0;
};
CanonicalPair canonical_pair(const NuisanceSet& g, const Observation& z, double quantile = 0.5);

/// || (eta - eta0)(zeta - zeta0) ||_{L2(P_W)} by enumeration.
double cross_error(const DiscreteOracle& oracle, const NuisanceSet& g, const NuisanceSet& g0,
                   double quantile = 0.5);

/// Value returned by orthogonality_slope when every deviation is zero.
inline constexpr double kSlopeInfinite = std::numeric_limits<double>::infinity();

/// Least-squares slope of log max_i |E[dl(theta, g_t)|x_i] - E[dl(theta, g0)|x_i]|
/// against log t for g_t = path(t).
double orthogonality_slope(const DiscreteOracle& oracle, const LossSpec& spec,
                           std::span<const double> theta_values, const NuisanceSet& g0,
                           const std::function<NuisanceSet(double)>& path,
                           std::span<const double> t_grid);

/// g0 + t * delta, component-wise; components absent from delta are kept.
NuisanceSet perturb(const NuisanceSet& g0, const std::map<std::string, Predictor>& delta, double t);

/// Mean loss of the calibrated predictions minus mean loss of the base ones.
double risk_delta(const Dataset& data, std::span<const double> calibrated,
                  std::span<const double> base, const NuisanceSet& g, const LossSpec& spec);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double cross = 0.0;
  double cal_under_g = 0.0;
  bool holds = false;
};

/// Cal(theta, g0) <= ||(eta - eta0)(zeta - zeta0)|| + Cal(theta, g) (+1e-10).
BoundCheck theorem_bound_check(const DiscreteOracle& oracle, std::span<const double> theta_values,
                               const NuisanceSet& g, const NuisanceSet& g0, const LossSpec& spec);

/// Box-plot summary: quartiles by linear interpolation between order
/// statistics, whiskers at the extreme observations inside
/// median +/- 1.5 (Q3 - Q1).
struct BoxSummary {
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  double mean = 0.0;
};
BoxSummary box_summary(std::vector<double> values);

/// Linear-interpolation quantile of sorted values.
double sorted_quantile(std::span<const double> sorted, double q);

struct MeanBand {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};
/// Mean with a normal-approximation 95% band, sd with n - 1 denominator.
MeanBand mean_band(std::span<const double> values);

}  // namespace causalcal
