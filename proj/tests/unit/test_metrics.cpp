#include "helpers.hpp"

#include <cmath>
#include <limits>

#include "causalcal/metrics.hpp"
#include "causalcal/synth.hpp"

using namespace causalcal;

namespace {

double mean_theta0(const DiscreteCateDgp& d) {
  double m = 0.0;
  for (std::size_t j = 0; j < d.atoms.size(); ++j) {
    double e1 = 0.0, e0 = 0.0;
    for (std::size_t k = 0; k < d.y_support[j].size(); ++k) {
      e1 += d.y_prob_arm1[j][k] * d.y_support[j][k];
      e0 += d.y_prob_arm0[j][k] * d.y_support[j][k];
    }
    m += d.px[j] * (e1 - e0);
  }
  return m;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("evaluation edges are lower order statistics") {
    const std::vector<double> preds{8, 7, 6, 5, 4, 3, 2, 1};
    const auto e = evaluation_edges(preds, 4);
    CHECK(e == std::vector<double>{2, 4, 6});
    CHECK(evaluation_bucket(e, 2.0) == 0);
    CHECK(evaluation_bucket(e, 2.1) == 1);
    CHECK(evaluation_bucket(e, 9.0) == 3);
    const std::vector<double> one{5};
    for (double v : evaluation_edges(one, 4)) CHECK(v == -std::numeric_limits<double>::infinity());
    CHECK_CATEGORY(evaluation_edges(one, 0), invalid_argument);
  }

  TEST_CASE("binned calibration error by hand") {
    const std::vector<double> edges{2, 4, 6};
    const std::vector<PseudoSample> s{{1, 2, 1}, {2, 2, 1}, {3, 3, 1}, {4, 4, 1}, {7, 5, 1}, {8, 6, 1}};
    const auto r = binned_cal_error(s, edges);
    CHECK(r.buckets[0].gap == doctest::Approx(0.5));
    CHECK(r.buckets[1].gap == doctest::Approx(0.0));
    CHECK(r.buckets[3].gap == doctest::Approx(-2.0));
    CHECK(r.empty_buckets == 1);
    CHECK(r.estimate == doctest::Approx(4.25 / 3.0));
    REQUIRE(r.flags.size() == 1);
    CHECK(r.flags[0] == "empty_buckets_dropped");
    CHECK_CATEGORY(binned_cal_error(std::vector<PseudoSample>{}, edges), evaluation_error);
  }

  TEST_CASE("binned QUT error by hand") {
    const std::vector<double> none;
    const std::vector<QutEvalPoint> balanced{{0, 1, -1, 2}, {0, 1, 1, 2}, {0, 0, -5, 2}};
    CHECK(binned_qut_error(balanced, none, 0.5).estimate == doctest::Approx(0.0));
    const std::vector<QutEvalPoint> low{{0, 1, -1, 2}, {0, 1, -2, 2}};
    const auto r = binned_qut_error(low, none, 0.5);
    CHECK(r.buckets[0].gap == doctest::Approx(1.0));
    CHECK(r.estimate == doctest::Approx(1.0));
  }

  TEST_CASE("summaries") {
    const auto b = box_summary({4, 100, 1, 3, 2});
    CHECK(b.count == 5);
    CHECK(b.median == 3.0);
    CHECK(b.q1 == 2.0);
    CHECK(b.q3 == 4.0);
    CHECK(b.whisker_low == 1.0);
    CHECK(b.whisker_high == 4.0);
    CHECK(b.mean == doctest::Approx(22.0));
    const std::vector<double> two{0, 10};
    CHECK(sorted_quantile(two, 0.25) == doctest::Approx(2.5));
    const std::vector<double> three{1, 2, 3};
    const auto m = mean_band(three);
    CHECK(m.mean == doctest::Approx(2.0));
    CHECK(m.sd == doctest::Approx(1.0));
    CHECK(m.upper - m.mean == doctest::Approx(1.959963984540054 / std::sqrt(3.0)));
    CHECK_CATEGORY(box_summary({}), invalid_argument);
  }

  TEST_CASE("exact calibration error on the discrete CATE model") {
    const auto dgp = DiscreteCateDgp::standard();
    const auto oracle = dgp.to_oracle();
    const auto g0 = dgp.true_nuisances(oracle);
    const auto spec = default_loss_spec(Effect::cate);
    const auto theta0 = dgp.theta0();
    CHECK(theta0[0] == doctest::Approx(0.8));
    CHECK(exact_cal_error(oracle, theta0, spec, g0) == doctest::Approx(0.0).epsilon(1e-12));
    const auto cm = conditional_minimizer(oracle, spec, g0);
    for (std::size_t i = 0; i < cm.size(); ++i) CHECK(cm[i] == doctest::Approx(theta0[i]));

    const double mt = mean_theta0(dgp);
    const std::vector<double> constant(oracle.support_size(), 3.0);
    CHECK(exact_cal_error(oracle, constant, spec, g0) == doctest::Approx(std::abs(3.0 - mt)));
    for (double v : calibration_function(oracle, constant, spec, g0)) CHECK(v == doctest::Approx(mt));
    CHECK_CATEGORY(exact_cal_error(oracle, std::vector<double>{1.0}, spec, g0), invalid_argument);
  }

  TEST_CASE("cross error and perturbation paths") {
    const auto dgp = DiscreteCateDgp::standard();
    const auto oracle = dgp.to_oracle();
    const auto g0 = dgp.true_nuisances(oracle);
    const auto spec = default_loss_spec(Effect::cate);
    CHECK(cross_error(oracle, g0, g0) == 0.0);

    const auto shifted = perturb(g0, {{"mu1", Predictor::constant(1.0)}}, 0.5);
    const std::vector<double> x{oracle.covariate(2).begin(), oracle.covariate(2).end()};
    CHECK(shifted.at("mu1")(x) == doctest::Approx(g0.at("mu1")(x) + 0.5));
    CHECK(shifted.at("pi")(x) == g0.at("pi")(x));

    const auto theta = dgp.theta0();
    const std::vector<double> ts{0.5, 0.25, 0.125, 0.0625};
    const auto s0 = conditional_scores(oracle, theta, spec, g0);
    const auto s1 = conditional_scores(oracle, theta, spec, perturb(g0, {{"mu1", Predictor::constant(1.0)}}, 0.5));
    for (std::size_t i = 0; i < s0.size(); ++i) CHECK(s1[i] == doctest::Approx(s0[i]).epsilon(1e-12));
    const double both = orthogonality_slope(
        oracle, spec, theta, g0,
        [&](double t) {
          return perturb(g0, {{"mu1", Predictor::constant(1.0)}, {"pi", Predictor::constant(0.05)}}, t);
        },
        ts);
    CHECK(both == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("bound check holds under misspecified nuisances") {
    const auto dgp = DiscreteCateDgp::standard();
    const auto oracle = dgp.to_oracle();
    const auto g0 = dgp.true_nuisances(oracle);
    const auto g = perturb(g0, {{"mu0", Predictor::constant(0.3)}, {"pi", Predictor::constant(-0.1)}}, 1.0);
    const std::vector<double> theta{0.1, 0.5, 0.5, 0.9, 1.2};
    const auto c = theorem_bound_check(oracle, theta, g, g0, default_loss_spec(Effect::cate));
    CHECK(c.holds);
    CHECK(c.cross > 0.0);
    CHECK(c.rhs == doctest::Approx(c.cross + c.cal_under_g));
  }

  TEST_CASE("risk delta of identical predictions") {
    const auto dgp = DiscreteCateDgp::standard();
    const auto oracle = dgp.to_oracle();
    const auto g0 = dgp.true_nuisances(oracle);
    const Dataset data = dgp.sample(50, derive_stream(3, 0));
    const std::vector<double> base(data.size(), 0.5);
    CHECK(risk_delta(data, base, base, g0, default_loss_spec(Effect::cate)) == 0.0);
    CHECK_CATEGORY(risk_delta(data, std::vector<double>{1.0}, base, g0, default_loss_spec(Effect::cate)),
                   invalid_argument);
  }
}
