#include "helpers.hpp"

#include <cmath>

#include "causalcal/nuisance.hpp"
#include "causalcal/synth.hpp"

using namespace causalcal;

namespace {

Learner ridge_learner(double penalty) {
  Learner l;
  l.kind = LearnerKind::ridge_linear;
  l.ridge_penalty = penalty;
  return l;
}

Dataset linear_data(std::size_t n) {
  Rng g(8);
  std::vector<Observation> rows(n);
  for (auto& r : rows) {
    r.x = {g.uniform(-1, 1), g.uniform(-1, 1)};
    r.a = g.bernoulli(0.5) ? 1.0 : 0.0;
    r.y = 2.0 + 3.0 * r.x[0] - r.x[1];
  }
  return Dataset(Schema{2, TreatmentKind::binary, false}, std::move(rows));
}

}  // namespace

TEST_SUITE("nuisance") {
  TEST_CASE("names round trip") {
    for (Effect e : {Effect::cate, Effect::acd, Effect::late_known_pi, Effect::late_iv, Effect::qut}) {
      CHECK(parse_effect(effect_name(e)) == e);
    }
    CHECK(effect_name(Effect::late_known_pi) == "late");
    CHECK(effect_name(Effect::late_iv) == "late-iv");
    for (LearnerKind k : {LearnerKind::boosted_regression_trees, LearnerKind::boosted_classification_trees,
                          LearnerKind::ridge_linear, LearnerKind::oracle}) {
      CHECK(parse_learner_kind(learner_kind_name(k)) == k);
    }
    CHECK_CATEGORY(parse_effect("ate"), config_error);
    CHECK_CATEGORY(parse_learner_kind("forest"), config_error);
  }

  TEST_CASE("required components") {
    CHECK(required_components(Effect::cate) == std::vector<std::string>{"mu0", "mu1", "pi"});
    CHECK(required_components(Effect::qut) == std::vector<std::string>{"p", "f"});
    CHECK_CATEGORY(NuisanceSet(Effect::cate, {{"mu0", Predictor::constant(0)}}), invalid_state);
    const NuisanceSet g(Effect::qut, {{"p", Predictor::constant(2)}, {"f", Predictor::constant(0.5)}});
    CHECK(g.has("p"));
    CHECK_CATEGORY(g.at("mu0"), invalid_state);
  }

  TEST_CASE("ridge recovers an exact linear function") {
    const Dataset d = linear_data(200);
    const Predictor p = fit_regressor(d, Target::outcome, ridge_learner(1e-9), derive_stream(0, 0));
    const std::vector<double> x{0.5, -0.25};
    CHECK(p(x) == doctest::Approx(2.0 + 1.5 + 0.25).epsilon(1e-6));
  }

  TEST_CASE("ridge shrinks towards the weighted mean") {
    const Dataset d = linear_data(200);
    const Predictor p = fit_regressor(d, Target::outcome, ridge_learner(1e9), derive_stream(0, 0));
    double mean = 0.0;
    for (const auto& r : d.rows()) mean += r.y;
    mean /= 200.0;
    const std::vector<double> x{0.9, 0.9};
    CHECK(p(x) == doctest::Approx(mean).epsilon(1e-4));
  }

  TEST_CASE("probabilities are clipped and validated") {
    FeatureMatrix f(6, 1);
    for (std::size_t i = 0; i < 6; ++i) f.at(i, 0) = static_cast<double>(i);
    const std::vector<double> labels{0, 0, 0, 1, 1, 1};
    Learner l;
    l.kind = LearnerKind::boosted_classification_trees;
    l.trees = TreeParams{1, 200, 0.5, 1, 0.0};
    const Predictor p = fit_probability(f, labels, l, 0.1, derive_stream(0, 0));
    for (double x = 0; x < 6; x += 1) {
      const std::vector<double> v{x};
      CHECK(p(v) >= 0.1);
      CHECK(p(v) <= 0.9);
    }
    const std::vector<double> one_class{1, 1, 1, 1, 1, 1};
    CHECK_CATEGORY(fit_probability(f, one_class, l, 0.1, derive_stream(0, 0)), degenerate_data);
    const std::vector<double> bad{0, 2, 0, 1, 1, 1};
    CHECK_CATEGORY(fit_probability(f, bad, l, 0.1, derive_stream(0, 0)), data_error);
    CHECK_CATEGORY(fit_probability(f, labels, l, 0.5, derive_stream(0, 0)), invalid_argument);
  }

  TEST_CASE("oracle learners cannot be fit") {
    Learner l;
    l.kind = LearnerKind::oracle;
    CHECK_CATEGORY(fit_regressor(linear_data(10), Target::outcome, l, derive_stream(0, 0)), config_error);
  }

  TEST_CASE("auxiliary fit collapses to constants when labels agree") {
    const Dataset d = linear_data(50);
    const std::vector<double> high(50, 100.0), low(50, -100.0);
    const std::vector<double> x{0.0, 0.0};
    CHECK(fit_qut_auxiliary(d, high, 0.5, Learner{}, derive_stream(0, 0))(x) == 1.0);
    CHECK(fit_qut_auxiliary(d, low, 0.5, Learner{}, derive_stream(0, 0))(x) == 0.0);
    CHECK_CATEGORY(fit_qut_auxiliary(d, low, 1.0, Learner{}, derive_stream(0, 0)), invalid_argument);
  }

  TEST_CASE("CATE nuisances on synthetic data") {
    SyntheticCateDgp dgp;
    dgp.constant_effect = true;
    dgp.noise = 0.1;
    const Dataset d = dgp.sample(3000, derive_stream(1, 0));
    NuisanceLearners learners;
    learners.outcome.trees = TreeParams{3, 80, 0.1, 10, 1.0};
    const NuisanceSet g = fit_nuisances(d, Effect::cate, learners, derive_stream(1, 1));
    const std::vector<double> x{0.1, 0.2, -0.3, 0.0, 0.0};
    CHECK(g.at("mu1")(x) - g.at("mu0")(x) == doctest::Approx(1.0).epsilon(0.15));
    CHECK(g.at("pi")(x) == doctest::Approx(dgp.propensity(x)).epsilon(0.15));
  }

  TEST_CASE("oracle passthrough and LATE requirements") {
    const DiscreteComplianceDgp dgp = DiscreteComplianceDgp::standard();
    const DiscreteOracle oracle = dgp.to_oracle();
    const NuisanceSet truth = dgp.true_late_nuisances(oracle);
    NuisanceLearners learners;
    learners.outcome.kind = LearnerKind::oracle;
    learners.oracle = truth.components();
    const Dataset tiny(Schema{1, TreatmentKind::binary, true},
                       {{{0.0}, 1.0, 1.0, 1.0}, {{1.0}, 0.0, 0.0, 0.0}});
    const NuisanceSet g = fit_nuisances(tiny, Effect::late_known_pi, learners, derive_stream(0, 0));
    const std::vector<double> x{2.0};
    CHECK(g.at("q")(x) == dgp.complier[2]);

    NuisanceLearners fitted;
    CHECK_CATEGORY(fit_nuisances(tiny, Effect::late_known_pi, fitted, derive_stream(0, 0)), config_error);
    const Dataset no_iv(Schema{1, TreatmentKind::binary, false},
                        {{{0.0}, 1.0, std::nullopt, 1.0}, {{1.0}, 0.0, std::nullopt, 0.0}});
    fitted.known_pi0 = Predictor::constant(0.5);
    CHECK_CATEGORY(fit_nuisances(no_iv, Effect::late_known_pi, fitted, derive_stream(0, 0)), config_error);
  }

  TEST_CASE("cross-fitting trains outside each fold") {
    const Dataset d = linear_data(60);
    NuisanceLearners learners;
    learners.outcome = ridge_learner(1e-6);
    learners.propensity.trees = TreeParams{1, 5, 0.1, 2, 1.0};
    const auto folds = split_folds(60, 3, derive_stream(2, 0));
    const auto fits = cross_fit(d, Effect::cate, learners, folds, derive_stream(2, 1));
    REQUIRE(fits.size() == 3);
    for (const auto& f : fits) {
      CHECK(f.train_indices.size() == 40);
      for (std::size_t i : f.train_indices) CHECK(folds.fold_of[i] != f.fold);
    }
    CHECK_CATEGORY(cross_fit(d, Effect::cate, learners, std::size_t{1}, derive_stream(2, 1)), invalid_argument);
  }

  TEST_CASE("fold errors carry the fold index") {
    const Dataset d = linear_data(10);
    NuisanceLearners learners;
    try {
      cross_fit(d, Effect::qut, learners, std::size_t{2}, derive_stream(0, 0));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("fold") != std::string::npos);
    }
  }
}
