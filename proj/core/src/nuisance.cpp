#include "causalcal/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "causalcal/error.hpp"
#include "causalcal/parallel.hpp"

namespace causalcal {

std::string_view learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::boosted_regression_trees: return "boosted-regression-trees";
    case LearnerKind::boosted_classification_trees: return "boosted-classification-trees";
    case LearnerKind::ridge_linear: return "ridge-linear";
    case LearnerKind::oracle: return "oracle";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(std::string_view name) {
  for (auto k : {LearnerKind::boosted_regression_trees, LearnerKind::boosted_classification_trees,
                 LearnerKind::ridge_linear, LearnerKind::oracle}) {
    if (learner_kind_name(k) == name) return k;
  }
  throw Error(ErrorCategory::config_error, "unknown learner kind '" + std::string(name) + "'");
}

std::string_view effect_name(Effect effect) {
  switch (effect) {
    case Effect::cate: return "cate";
    case Effect::acd: return "acd";
    case Effect::late_known_pi: return "late";
    case Effect::late_iv: return "late-iv";
    case Effect::qut: return "qut";
  }
  return "unknown";
}

Effect parse_effect(std::string_view name) {
  for (auto e : {Effect::cate, Effect::acd, Effect::late_known_pi, Effect::late_iv, Effect::qut}) {
    if (effect_name(e) == name) return e;
  }
  throw Error(ErrorCategory::config_error, "unknown effect '" + std::string(name) + "'");
}

std::vector<std::string> required_components(Effect effect) {
  switch (effect) {
    case Effect::cate: return {"mu0", "mu1", "pi"};
    case Effect::acd: return {"mu", "dmu", "score"};
    case Effect::late_known_pi: return {"p", "q", "pi0"};
    case Effect::late_iv: return {"mu0", "mu1", "pi", "zeta_inst"};
    case Effect::qut: return {"p", "f"};
  }
  return {};
}

NuisanceSet::NuisanceSet(Effect effect, std::map<std::string, Predictor> components)
    : effect_(effect), components_(std::move(components)) {
  for (const auto& name : required_components(effect)) {
    auto it = components_.find(name);
    if (it == components_.end() || !it->second.valid()) {
      throw Error(ErrorCategory::invalid_state, "nuisance set for " + std::string(effect_name(effect)) +
                                                    " lacks component '" + name + "'");
    }
  }
}

const Predictor& NuisanceSet::at(const std::string& name) const {
  auto it = components_.find(name);
  if (it == components_.end()) {
    throw Error(ErrorCategory::invalid_state, "nuisance component '" + name + "' is missing");
  }
  return it->second;
}

FeatureMatrix covariate_matrix(const Dataset& data, bool with_treatment) {
  const std::size_t off = with_treatment ? 1 : 0;
  FeatureMatrix m(data.size(), data.schema().dim + off);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& row = data[i];
    if (with_treatment) m.at(i, 0) = row.a;
    for (std::size_t j = 0; j < row.x.size(); ++j) m.at(i, j + off) = row.x[j];
  }
  return m;
}

namespace {

struct RidgeModel {
  Eigen::VectorXd coef;
  double intercept = 0.0;
};

RidgeModel ridge(const FeatureMatrix& X, std::span<const double> y, std::span<const double> w,
                 double penalty) {
  const auto n = static_cast<Eigen::Index>(X.rows());
  const auto p = static_cast<Eigen::Index>(X.cols());
  Eigen::VectorXd wt(n);
  for (Eigen::Index i = 0; i < n; ++i) wt(i) = w.empty() ? 1.0 : w[static_cast<std::size_t>(i)];
  const double wsum = wt.sum();
  if (!(wsum > 0.0)) throw Error(ErrorCategory::invalid_argument, "ridge weights sum to zero");
  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = X.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  for (Eigen::Index i = 0; i < n; ++i) b(i) = y[static_cast<std::size_t>(i)];
  const Eigen::RowVectorXd xbar = (wt.transpose() * A) / wsum;
  const double ybar = wt.dot(b) / wsum;
  A.rowwise() -= xbar;
  b.array() -= ybar;
  Eigen::MatrixXd gram = A.transpose() * wt.asDiagonal() * A;
  gram.diagonal().array() += penalty;
  const Eigen::VectorXd rhs = A.transpose() * wt.asDiagonal() * b;
  RidgeModel m;
  m.coef = gram.ldlt().solve(rhs);
  m.intercept = ybar - xbar.dot(m.coef);
  return m;
}

void check_target(const FeatureMatrix& features, std::span<const double> target) {
  if (features.rows() < 2) {
    throw Error(ErrorCategory::invalid_argument, "at least 2 rows are needed to fit a nuisance");
  }
  if (target.size() != features.rows()) {
    throw Error(ErrorCategory::invalid_argument, "target size does not match feature rows");
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!std::isfinite(target[i])) {
      throw Error(ErrorCategory::data_error, "non-finite target at row " + std::to_string(i));
    }
  }
}

Predictor ensemble_predictor(BoostedEnsemble ens, std::string description) {
  auto shared = std::make_shared<const BoostedEnsemble>(std::move(ens));
  return Predictor(std::move(description),
                   [shared](std::span<const double> x) { return shared->predict(x); });
}

Predictor ridge_predictor(RidgeModel m, std::string description) {
  auto shared = std::make_shared<const RidgeModel>(std::move(m));
  return Predictor(std::move(description), [shared](std::span<const double> x) {
    double v = shared->intercept;
    for (Eigen::Index j = 0; j < shared->coef.size(); ++j) v += shared->coef(j) * x[static_cast<std::size_t>(j)];
    return v;
  });
}

Predictor clipped(Predictor inner, double lo, double hi) {
  std::string d = inner.description();
  return Predictor(d, [inner, lo, hi](std::span<const double> x) { return std::clamp(inner(x), lo, hi); });
}

std::vector<double> column_of(const Dataset& data, Target target) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& row : data.rows()) {
    switch (target) {
      case Target::outcome: out.push_back(row.y); break;
      case Target::treatment: out.push_back(row.a); break;
      case Target::instrument:
        if (!row.d) throw Error(ErrorCategory::data_error, "dataset has no instrument column");
        out.push_back(*row.d);
        break;
    }
  }
  return out;
}

}  // namespace

Predictor fit_regressor(const FeatureMatrix& features, std::span<const double> target,
                        std::span<const double> weights, const Learner& learner,
                        const SeedStream& /*seed*/) {
  check_target(features, target);
  switch (learner.kind) {
    case LearnerKind::boosted_regression_trees:
      return ensemble_predictor(
          fit_boosted(features, target, weights, BoostObjective::squared, learner.trees),
          "boosted-regression-trees");
    case LearnerKind::boosted_classification_trees: {
      for (double t : target) {
        if (t < 0.0 || t > 1.0) {
          throw Error(ErrorCategory::data_error, "classification targets must lie in [0, 1]");
        }
      }
      return ensemble_predictor(
          fit_boosted(features, target, weights, BoostObjective::logistic, learner.trees),
          "boosted-classification-trees");
    }
    case LearnerKind::ridge_linear:
      return ridge_predictor(ridge(features, target, weights, learner.ridge_penalty), "ridge-linear");
    case LearnerKind::oracle:
      break;
  }
  throw Error(ErrorCategory::config_error, "oracle learners cannot be fit; inject components instead");
}

Predictor fit_regressor(const Dataset& data, Target target, const Learner& learner,
                        const SeedStream& seed) {
  if (data.size() < 2) {
    throw Error(ErrorCategory::invalid_argument, "at least 2 rows are needed to fit a nuisance");
  }
  const auto y = column_of(data, target);
  return fit_regressor(covariate_matrix(data), y, {}, learner, seed);
}

Predictor fit_probability(const FeatureMatrix& features, std::span<const double> labels,
                          const Learner& learner, double clip, const SeedStream& seed) {
  if (features.rows() == 0) throw Error(ErrorCategory::invalid_argument, "no rows to fit");
  bool has0 = false, has1 = false;
  for (double v : labels) {
    if (v == 0.0) has0 = true;
    else if (v == 1.0) has1 = true;
    else throw Error(ErrorCategory::data_error, "probability labels must be 0 or 1");
  }
  if (!has0 || !has1) {
    throw Error(ErrorCategory::degenerate_data, "binary column has a single class");
  }
  if (clip < 0.0 || clip >= 0.5) throw Error(ErrorCategory::invalid_argument, "clip must lie in [0, 1/2)");
  Learner l = learner;
  if (l.kind == LearnerKind::boosted_regression_trees) l.kind = LearnerKind::boosted_classification_trees;
  return clipped(fit_regressor(features, labels, {}, l, seed), clip, 1.0 - clip);
}

Predictor fit_propensity(const Dataset& data, Target column, const Learner& learner, double clip,
                         const SeedStream& seed) {
  if (data.empty()) throw Error(ErrorCategory::invalid_argument, "empty dataset");
  const auto labels = column_of(data, column);
  return fit_probability(covariate_matrix(data), labels, learner, clip, seed);
}

Predictor fit_qut_auxiliary(const Dataset& data, std::span<const double> base_preds, double quantile,
                            const Learner& learner, const SeedStream& seed) {
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw Error(ErrorCategory::invalid_argument, "quantile must lie in (0, 1)");
  }
  if (base_preds.size() != data.size()) {
    throw Error(ErrorCategory::invalid_argument, "base predictions do not match the data");
  }
  std::vector<std::size_t> treated;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].a == 1.0) treated.push_back(i);
  }
  if (treated.empty()) throw Error(ErrorCategory::degenerate_data, "no treated units for the auxiliary fit");
  const Dataset sub = data.subset(treated);
  std::vector<double> labels(treated.size());
  std::size_t ones = 0;
  for (std::size_t r = 0; r < treated.size(); ++r) {
    labels[r] = data[treated[r]].y <= base_preds[treated[r]] ? 1.0 : 0.0;
    ones += labels[r] == 1.0;
  }
  if (ones == 0) return Predictor::constant(0.0);
  if (ones == labels.size()) return Predictor::constant(1.0);
  Learner l = learner;
  if (l.kind == LearnerKind::oracle) l.kind = LearnerKind::boosted_classification_trees;
  return fit_probability(covariate_matrix(sub), labels, l, 0.0, seed);
}

namespace {

Dataset arm(const Dataset& data, Target column, double value) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    const double v = column == Target::treatment ? r.a : r.d.value_or(-1.0);
    if (v == value) idx.push_back(i);
  }
  return data.subset(idx);
}

Predictor fit_arm(const Dataset& data, Target split, double value, Target target, const Learner& learner,
                  const SeedStream& seed, const std::string& name) {
  const Dataset sub = arm(data, split, value);
  if (sub.size() < 2) {
    throw Error(ErrorCategory::degenerate_data, "too few rows to fit '" + name + "'");
  }
  return fit_regressor(sub, target, learner, seed);
}

Predictor difference(Predictor a, Predictor b, std::string name) {
  return Predictor(std::move(name), [a, b](std::span<const double> x) { return a(x) - b(x); });
}

Predictor reciprocal(Predictor a, std::string name) {
  return Predictor(std::move(name), [a](std::span<const double> x) { return 1.0 / a(x); });
}

/// mu(a, x) = c0 + c1 a + c2 a^2 + <b, x> + a <d, x>, fit by ridge on [a, a^2, x, a x].
std::pair<Predictor, Predictor> fit_acd_outcome(const Dataset& data, const Learner& learner) {
  const std::size_t p = data.schema().dim;
  FeatureMatrix m(data.size(), 2 + 2 * p);
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    m.at(i, 0) = r.a;
    m.at(i, 1) = r.a * r.a;
    for (std::size_t j = 0; j < p; ++j) {
      m.at(i, 2 + j) = r.x[j];
      m.at(i, 2 + p + j) = r.a * r.x[j];
    }
    y[i] = r.y;
  }
  check_target(m, y);
  auto model = std::make_shared<const RidgeModel>(ridge(m, y, {}, learner.ridge_penalty));
  Predictor mu("ridge-interaction", [model, p](std::span<const double> ax) {
    const double a = ax[0];
    double v = model->intercept + model->coef(0) * a + model->coef(1) * a * a;
    for (std::size_t j = 0; j < p; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      v += model->coef(2 + jj) * ax[1 + j] + model->coef(2 + static_cast<Eigen::Index>(p) + jj) * a * ax[1 + j];
    }
    return v;
  });
  Predictor dmu("ridge-interaction-derivative", [model, p](std::span<const double> ax) {
    const double a = ax[0];
    double v = model->coef(0) + 2.0 * model->coef(1) * a;
    for (std::size_t j = 0; j < p; ++j) {
      v += model->coef(2 + static_cast<Eigen::Index>(p + j)) * ax[1 + j];
    }
    return v;
  });
  return {mu, dmu};
}

/// Gaussian location model a | x ~ N(m(x), s^2): score = -(a - m(x)) / s^2.
Predictor fit_acd_score(const Dataset& data, const Learner& learner) {
  const FeatureMatrix xm = covariate_matrix(data);
  std::vector<double> a(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) a[i] = data[i].a;
  auto model = std::make_shared<const RidgeModel>(ridge(xm, a, {}, learner.ridge_penalty));
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double m = model->intercept;
    for (Eigen::Index j = 0; j < model->coef.size(); ++j) m += model->coef(j) * data[i].x[static_cast<std::size_t>(j)];
    ss += (a[i] - m) * (a[i] - m);
  }
  const double var = std::max(ss / static_cast<double>(data.size()), 1e-8);
  return Predictor("gaussian-location-score", [model, var](std::span<const double> ax) {
    double m = model->intercept;
    for (Eigen::Index j = 0; j < model->coef.size(); ++j) m += model->coef(j) * ax[1 + static_cast<std::size_t>(j)];
    return -(ax[0] - m) / var;
  });
}

NuisanceSet oracle_set(Effect effect, const NuisanceLearners& learners) {
  std::map<std::string, Predictor> comps;
  for (const auto& name : required_components(effect)) {
    auto it = learners.oracle.find(name);
    if (it != learners.oracle.end()) {
      comps.emplace(name, it->second);
    } else if (name == "pi0" && learners.known_pi0) {
      comps.emplace(name, *learners.known_pi0);
    } else {
      throw Error(ErrorCategory::config_error, "oracle learner lacks component '" + name + "'");
    }
  }
  return NuisanceSet(effect, std::move(comps));
}

}  // namespace

NuisanceSet fit_nuisances(const Dataset& data, Effect effect, const NuisanceLearners& learners,
                          const SeedStream& seed, std::span<const double> base_preds) {
  if (learners.outcome.kind == LearnerKind::oracle) return oracle_set(effect, learners);
  if (data.size() < 2) throw Error(ErrorCategory::invalid_argument, "too few rows to fit nuisances");
  const Learner& out = learners.outcome;
  const Learner& prop = learners.propensity;
  std::map<std::string, Predictor> c;
  switch (effect) {
    case Effect::cate:
      c.emplace("mu0", fit_arm(data, Target::treatment, 0.0, Target::outcome, out, seed.child(0), "mu0"));
      c.emplace("mu1", fit_arm(data, Target::treatment, 1.0, Target::outcome, out, seed.child(1), "mu1"));
      c.emplace("pi", fit_propensity(data, Target::treatment, prop, prop.clip, seed.child(2)));
      break;
    case Effect::acd: {
      auto [mu, dmu] = fit_acd_outcome(data, out);
      c.emplace("mu", mu);
      c.emplace("dmu", dmu);
      c.emplace("score", fit_acd_score(data, out));
      break;
    }
    case Effect::late_known_pi: {
      if (!data.schema().has_instrument) {
        throw Error(ErrorCategory::config_error, "the LATE loss needs an instrument column");
      }
      if (learners.known_pi0) {
        c.emplace("pi0", *learners.known_pi0);
      } else if (auto it = learners.oracle.find("pi0"); it != learners.oracle.end()) {
        c.emplace("pi0", it->second);
      } else {
        throw Error(ErrorCategory::config_error,
                    "the LATE loss needs a known assignment propensity (known_pi0); use late-iv otherwise");
      }
      auto y1 = fit_arm(data, Target::instrument, 1.0, Target::outcome, out, seed.child(0), "p");
      auto y0 = fit_arm(data, Target::instrument, 0.0, Target::outcome, out, seed.child(1), "p");
      auto a1 = fit_arm(data, Target::instrument, 1.0, Target::treatment, out, seed.child(2), "q");
      auto a0 = fit_arm(data, Target::instrument, 0.0, Target::treatment, out, seed.child(3), "q");
      c.emplace("p", difference(y1, y0, "p"));
      c.emplace("q", difference(a1, a0, "q"));
      break;
    }
    case Effect::late_iv:
      if (!data.schema().has_instrument) {
        throw Error(ErrorCategory::config_error, "the LATE-IV loss needs an instrument column");
      }
      c.emplace("mu0", fit_arm(data, Target::treatment, 0.0, Target::outcome, out, seed.child(0), "mu0"));
      c.emplace("mu1", fit_arm(data, Target::treatment, 1.0, Target::outcome, out, seed.child(1), "mu1"));
      c.emplace("pi", fit_propensity(data, Target::treatment, prop, prop.clip, seed.child(2)));
      c.emplace("zeta_inst", fit_propensity(data, Target::instrument, prop, prop.clip, seed.child(3)));
      break;
    case Effect::qut: {
      const auto pi = fit_propensity(data, Target::treatment, prop, prop.clip, seed.child(0));
      c.emplace("p", reciprocal(pi, "inverse-propensity"));
      c.emplace("f", fit_qut_auxiliary(data, base_preds, 0.5, prop, seed.child(1)));
      break;
    }
  }
  return NuisanceSet(effect, std::move(c));
}

std::vector<FoldNuisance> cross_fit(const Dataset& data, Effect effect, const NuisanceLearners& learners,
                                    const FoldAssignment& folds, const SeedStream& seed,
                                    std::span<const double> base_preds) {
  if (folds.k < 2) throw Error(ErrorCategory::invalid_argument, "cross-fitting needs at least 2 folds");
  if (folds.n != data.size()) throw Error(ErrorCategory::invalid_argument, "fold assignment size mismatch");
  if (!base_preds.empty() && base_preds.size() != data.size()) {
    throw Error(ErrorCategory::invalid_argument, "base predictions do not match the data");
  }
  std::vector<FoldNuisance> out(folds.k);
  parallel_for(folds.k, [&](std::size_t k) {
    auto train = folds.indices_out(k);
    std::vector<double> preds;
    if (!base_preds.empty()) {
      preds.reserve(train.size());
      for (std::size_t i : train) preds.push_back(base_preds[i]);
    }
    try {
      out[k] = FoldNuisance{k, fit_nuisances(data.subset(train), effect, learners, seed.child(k), preds),
                            std::move(train)};
    } catch (const Error& e) {
      throw e.with_context("fold " + std::to_string(k));
    }
  });
  return out;
}

std::vector<FoldNuisance> cross_fit(const Dataset& data, Effect effect, const NuisanceLearners& learners,
                                    std::size_t k, const SeedStream& seed,
                                    std::span<const double> base_preds) {
  if (k < 2) throw Error(ErrorCategory::invalid_argument, "cross-fitting needs at least 2 folds");
  return cross_fit(data, effect, learners, split_folds(data.size(), k, seed.child(1000)), seed, base_preds);
}

}  // namespace causalcal
