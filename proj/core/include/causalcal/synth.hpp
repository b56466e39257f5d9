#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "causalcal/data.hpp"
#include "causalcal/nuisance.hpp"
#include "causalcal/oracle.hpp"
#include "causalcal/rng.hpp"

namespace causalcal {

/// Sparse linear Gaussian model for quantiles under treatment:
/// X ~ N(0, I_dim), pi(x) = clip(1 / (1 + exp(<beta_pi, x>)), clip, 1 - clip),
/// Y(1) = Y(0) = <beta_y, x> + N(0, 1).
struct QutDgp {
  std::size_t dim = 100;
  std::size_t nonzero = 20;
  double clip = 0.05;
  std::vector<double> beta_y;
  std::vector<double> beta_pi;

  /// First `nonzero` coordinates of each slope drawn N(0, 1), rest zero.
  static QutDgp draw(const SeedStream& seed, std::size_t dim = 100, std::size_t nonzero = 20,
                     double clip = 0.05);

  double propensity(std::span<const double> x) const;
  double mean(std::span<const double> x) const;
};

Dataset sample_qut(std::size_t n, const QutDgp& dgp, const SeedStream& seed);

/// <beta_y, x> + Phi^{-1}(Q).
double true_qut_quantile(const QutDgp& dgp, std::span<const double> x, double quantile);

/// Standard normal quantile function.
double normal_quantile(double p);
double normal_cdf(double x);

/// Finite CATE model: covariate atoms x_j (1-d), propensity pi_j and per-arm
/// outcome laws on a finite support.
struct DiscreteCateDgp {
  std::vector<double> atoms;
  std::vector<double> px;
  std::vector<double> pi;
  std::vector<std::vector<double>> y_support;    // per atom
  std::vector<std::vector<double>> y_prob_arm0;  // per atom, over y_support
  std::vector<std::vector<double>> y_prob_arm1;

  /// 5 atoms with three-point outcome laws.
  static DiscreteCateDgp standard();
  /// Random 5-atom model.
  static DiscreteCateDgp random(const SeedStream& seed, std::size_t atoms = 5);

  DiscreteOracle to_oracle() const;
  Dataset sample(std::size_t n, const SeedStream& seed) const;

  std::vector<double> mu(int arm) const;
  std::vector<double> theta0() const;
  /// True (mu0, mu1, pi) as table predictors on the oracle support.
  NuisanceSet true_nuisances(const DiscreteOracle& oracle) const;
};

/// Finite one-sided-noncompliance model: instrument d ~ Bernoulli(pi0),
/// treatment a depends on (d, complier type), binary outcome.
struct DiscreteComplianceDgp {
  std::vector<double> atoms;
  std::vector<double> px;
  std::vector<double> pi0;          // P(D = 1 | x)
  std::vector<double> complier;     // P(complier | x)
  std::vector<double> always;       // P(always-taker | x)
  std::vector<double> y0;           // P(Y = 1 | A = 0, x)
  std::vector<double> effect;       // added to P(Y = 1) when A = 1

  static DiscreteComplianceDgp standard();
  DiscreteOracle to_oracle() const;

  /// Wald contrasts p0 = E[Y | D=1] - E[Y | D=0], q0 = E[A | D=1] - E[A | D=0].
  std::vector<double> p0() const;
  std::vector<double> q0() const;
  NuisanceSet true_late_nuisances(const DiscreteOracle& oracle) const;
  /// (mu0, mu1, pi, zeta_inst) with mu and pi defined on the received treatment.
  NuisanceSet true_late_iv_nuisances(const DiscreteOracle& oracle) const;
};

/// Finite QUT model with discrete outcomes for exact conditional-orthogonality checks.
struct DiscreteQutDgp {
  std::vector<double> atoms;
  std::vector<double> px;
  std::vector<double> pi;
  std::vector<double> y_support;
  std::vector<std::vector<double>> y_prob;  // per atom, Y(1) = Y(0) law

  static DiscreteQutDgp standard();
  DiscreteOracle to_oracle() const;
  NuisanceSet nuisances(const DiscreteOracle& oracle, std::span<const double> f) const;
};

/// Continuous CATE model on dim covariates uniform on [-1, 1]:
/// pi(x) = clip(sigmoid(0.8 x1 - 0.5 x2), 0.1, 0.9), mu0(x) = x1 + 0.5 x2^2,
/// tau(x) = 1 + x1 + 0.5 sin(pi x3) (or tau = 1 when constant_effect),
/// Y = mu0 + A tau + N(0, noise^2).
struct SyntheticCateDgp {
  std::size_t dim = 5;
  double noise = 1.0;
  bool constant_effect = false;

  double propensity(std::span<const double> x) const;
  double mu0(std::span<const double> x) const;
  double tau(std::span<const double> x) const;
  Dataset sample(std::size_t n, const SeedStream& seed) const;
};

/// Continuous-treatment model: A | x ~ Beta(2, 2) (median of three
/// uniforms), mu(a, x) = a tau(x) + a^2 / 2 + x1, tau(x) = 1 + x1,
/// so theta0(x) = E[tau(x) + A | x] = 1.5 + x1.
struct AcdDgp {
  std::size_t dim = 3;
  double noise = 0.5;

  double mu(double a, std::span<const double> x) const;
  double dmu(double a, std::span<const double> x) const;
  /// d/da log density of Beta(2, 2): 1/a - 1/(1 - a).
  double score(double a) const;
  double theta0(std::span<const double> x) const;
  Dataset sample(std::size_t n, const SeedStream& seed) const;
  NuisanceSet true_nuisances() const;
};

}  // namespace causalcal
