#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalcal/data.hpp"
#include "causalcal/folds.hpp"
#include "causalcal/predictor.hpp"
#include "causalcal/rng.hpp"
#include "causalcal/trees.hpp"

namespace causalcal {

enum class LearnerKind {
  boosted_regression_trees,
  boosted_classification_trees,
  ridge_linear,
  oracle,
};

struct Learner {
  LearnerKind kind = LearnerKind::boosted_regression_trees;
  TreeParams trees;
  double ridge_penalty = 1.0;
  /// Probability-valued fits are clipped to [clip, 1 - clip].
  double clip = 0.05;
};

std::string_view learner_kind_name(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view name);

enum class Effect { cate, acd, late_known_pi, late_iv, qut };

std::string_view effect_name(Effect effect);
Effect parse_effect(std::string_view name);

/// Universally orthogonal effects admit pseudo-outcomes; QUT does not.
inline bool is_universal(Effect effect) { return effect != Effect::qut; }

/// Component names each effect's loss needs.
///   cate:          mu0(x), mu1(x), pi(x)
///   acd:           mu([a,x]), dmu([a,x]) = d/da mu, score([a,x]) = d/da log density(a|x)
///   late_known_pi: p(x), q(x), pi0(x)
///   late_iv:       mu0(x), mu1(x), pi(x), zeta_inst(x)
///   qut:           p(x) = 1/pi(x), f(x)
std::vector<std::string> required_components(Effect effect);

/// The effect-specific bundle of fitted nuisance functions.
class NuisanceSet {
 public:
  NuisanceSet() = default;
  /// Throws invalid-state when a required component is missing.
  NuisanceSet(Effect effect, std::map<std::string, Predictor> components);

  Effect effect() const noexcept { return effect_; }
  bool has(const std::string& name) const { return components_.count(name) != 0; }
  const Predictor& at(const std::string& name) const;
  const std::map<std::string, Predictor>& components() const noexcept { return components_; }

 private:
  Effect effect_ = Effect::cate;
  std::map<std::string, Predictor> components_;
};

struct NuisanceLearners {
  Learner outcome;
  Learner propensity{LearnerKind::boosted_classification_trees, TreeParams{}, 1.0, 0.05};
  /// Injected true functions; used for every component when outcome.kind is oracle.
  std::map<std::string, Predictor> oracle;
  /// pi0(x) = P(D = 1 | X = x) for the LATE loss with known assignment propensity.
  std::optional<Predictor> known_pi0;
};

enum class Target { outcome, treatment, instrument };

Predictor fit_regressor(const Dataset& data, Target target, const Learner& learner,
                        const SeedStream& seed);
/// Low-level form; `weights` may be empty.
Predictor fit_regressor(const FeatureMatrix& features, std::span<const double> target,
                        std::span<const double> weights, const Learner& learner,
                        const SeedStream& seed);

/// P(column = 1 | X) clipped to [clip, 1 - clip]. The column must be binary
/// with both classes present (degenerate-data otherwise).
Predictor fit_propensity(const Dataset& data, Target column, const Learner& learner, double clip,
                         const SeedStream& seed);
Predictor fit_probability(const FeatureMatrix& features, std::span<const double> labels,
                          const Learner& learner, double clip, const SeedStream& seed);

/// Estimate of x -> P(Y <= base(x) | X = x, A = 1), fit on treated rows.
/// `base_preds` are the base model's predictions for the rows of `data`.
Predictor fit_qut_auxiliary(const Dataset& data, std::span<const double> base_preds,
                            double quantile, const Learner& learner, const SeedStream& seed);

/// Fits every component `effect` needs on all rows of `data`.
/// `base_preds` is required for QUT.
NuisanceSet fit_nuisances(const Dataset& data, Effect effect, const NuisanceLearners& learners,
                          const SeedStream& seed, std::span<const double> base_preds = {});

struct FoldNuisance {
  std::size_t fold = 0;
  NuisanceSet nuisances;
  std::vector<std::size_t> train_indices;
};

/// One NuisanceSet per fold, each fit on the rows outside that fold.
std::vector<FoldNuisance> cross_fit(const Dataset& data, Effect effect,
                                    const NuisanceLearners& learners, const FoldAssignment& folds,
                                    const SeedStream& seed, std::span<const double> base_preds = {});
std::vector<FoldNuisance> cross_fit(const Dataset& data, Effect effect,
                                    const NuisanceLearners& learners, std::size_t k,
                                    const SeedStream& seed, std::span<const double> base_preds = {});

/// Covariates of `data` as a feature matrix; with_treatment prepends column a.
FeatureMatrix covariate_matrix(const Dataset& data, bool with_treatment = false);

}  // namespace causalcal
