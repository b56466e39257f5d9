#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalcal/data.hpp"
#include "causalcal/losses.hpp"
#include "causalcal/nuisance.hpp"
#include "causalcal/predictor.hpp"

namespace causalcal {

/// One atom of the conditional law of (A, D, Y) given X = x.
struct OracleAtom {
  double a = 0.0;
  double d = 0.0;
  double y = 0.0;
  double prob = 0.0;
};

/// Finite-support data-generating process on which conditional expectations
/// are computed exactly by summation.
class DiscreteOracle {
 public:
  DiscreteOracle() = default;
  /// Throws invalid-argument unless px and every conditional law sum to 1
  /// (within 1e-12) and all probabilities are nonnegative.
  DiscreteOracle(std::vector<std::vector<double>> covariates, std::vector<double> px,
                 std::vector<std::vector<OracleAtom>> conditional, bool has_instrument = false);

  static DiscreteOracle from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t support_size() const noexcept { return px_.size(); }
  std::span<const double> covariate(std::size_t i) const { return covariates_[i]; }
  double prob(std::size_t i) const { return px_[i]; }
  std::span<const OracleAtom> atoms(std::size_t i) const { return conditional_[i]; }
  bool has_instrument() const noexcept { return has_instrument_; }

  Observation observation(std::size_t i, const OracleAtom& atom) const;

  /// E[h(Z) | X = x_i].
  double conditional_mean(std::size_t i, const std::function<double(const Observation&)>& h) const;

  /// Predictor that looks up a per-support-point table by exact covariate match.
  Predictor table_predictor(std::vector<double> values, std::string description = "table") const;
  /// Predictor on [a, x] that looks up per-(support point, treatment) values.
  Predictor treatment_table_predictor(std::vector<double> at_a0, std::vector<double> at_a1,
                                      std::string description = "table") const;

  std::size_t index_of(std::span<const double> x) const;

 private:
  std::vector<std::vector<double>> covariates_;
  std::vector<double> px_;
  std::vector<std::vector<OracleAtom>> conditional_;
  bool has_instrument_ = false;
};

/// Conditional expected loss of a bound loss family on a DiscreteOracle.
class DiscreteLossOracle final : public ConditionalLossOracle {
 public:
  DiscreteLossOracle(const DiscreteOracle& oracle, LossSpec spec, NuisanceSet g);
  std::size_t support_size() const override { return oracle_.support_size(); }
  double expected_loss(std::size_t i, double nu) const override;
  double expected_derivative(std::size_t i, double nu) const;

 private:
  const DiscreteOracle& oracle_;
  LossSpec spec_;
  NuisanceSet g_;
};

/// Conditional expected (corrected) QUT pinball loss when Y(1) | X = x_i is
/// N(mean_i, 1), A | X = x_i is Bernoulli(pi0_i) and the loss uses inverse
/// propensity p_i and auxiliary f_i. Closed form; curvature pi0_i p_i phi(nu - mean_i).
class GaussianQutOracle final : public ConditionalLossOracle {
 public:
  GaussianQutOracle(std::vector<double> means, std::vector<double> pi0, std::vector<double> p,
                    std::vector<double> f, double quantile);
  std::size_t support_size() const override { return means_.size(); }
  double expected_loss(std::size_t i, double nu) const override;

 private:
  std::vector<double> means_;
  std::vector<double> pi0_;
  std::vector<double> p_;
  std::vector<double> f_;
  double quantile_;
};

}  // namespace causalcal
