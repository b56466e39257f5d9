#include "helpers.hpp"

#include <cmath>

#include "causalcal/rng.hpp"
#include "causalcal/trees.hpp"

using namespace causalcal;

namespace {

FeatureMatrix column_matrix(const std::vector<double>& x) {
  FeatureMatrix m(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m.at(i, 0) = x[i];
  return m;
}

}  // namespace

TEST_SUITE("trees") {
  TEST_CASE("weighted quantile by hand") {
    const std::vector<double> v{3, 1, 2}, w{1, 1, 2};
    CHECK(weighted_quantile(v, w, 0.5) == 2.0);
    CHECK(weighted_quantile(v, w, 0.25) == 1.0);
    CHECK(weighted_quantile(v, w, 1.0) == 3.0);
    const std::vector<double> u{5, 1, 4, 2, 3};
    CHECK(weighted_quantile(u, {}, 0.5) == 3.0);
    const std::vector<double> zero{0, 0, 0};
    CHECK_CATEGORY(weighted_quantile(v, zero, 0.5), invalid_argument);
  }

  TEST_CASE("squared boosting fits a step") {
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
      x.push_back(i / 200.0);
      y.push_back(i >= 100 ? 1.0 : 0.0);
    }
    const auto m = fit_boosted(column_matrix(x), y, {}, BoostObjective::squared, TreeParams{1, 60, 0.3, 5, 0.0});
    const std::vector<double> lo{0.2}, hi{0.8};
    CHECK(m.predict(lo) == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
    CHECK(m.predict(hi) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m.num_trees() == 60);
  }

  TEST_CASE("zero rounds returns the initial value") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 2, 3, 10};
    const auto sq = fit_boosted(column_matrix(x), y, {}, BoostObjective::squared, TreeParams{2, 0, 0.1, 1, 1.0});
    CHECK(sq.init() == 4.0);
    const auto pin = fit_boosted(column_matrix(x), y, {}, BoostObjective::pinball, TreeParams{2, 0, 0.1, 1, 1.0}, 0.5);
    CHECK(pin.init() == 2.0);
  }

  TEST_CASE("pinball boosting tracks a conditional quantile") {
    Rng g(4);
    std::vector<double> x, y;
    for (int i = 0; i < 3000; ++i) {
      const double xi = g.uniform();
      x.push_back(xi);
      y.push_back(2.0 * xi + g.uniform());
    }
    const double q = 0.75;
    const auto m = fit_boosted(column_matrix(x), y, {}, BoostObjective::pinball, TreeParams{2, 100, 0.1, 20, 1.0}, q);
    int below = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::vector<double> xi{x[i]};
      below += y[i] <= m.predict(xi);
    }
    CHECK(below / 3000.0 == doctest::Approx(q).epsilon(0.03));
    const std::vector<double> mid{0.5};
    CHECK(m.predict(mid) == doctest::Approx(1.75).epsilon(0.1));
  }

  TEST_CASE("logistic boosting orders probabilities") {
    Rng g(5);
    std::vector<double> x, y;
    for (int i = 0; i < 2000; ++i) {
      const double xi = g.uniform(-2, 2);
      x.push_back(xi);
      y.push_back(g.bernoulli(1.0 / (1.0 + std::exp(-2.0 * xi))) ? 1.0 : 0.0);
    }
    const auto m = fit_boosted(column_matrix(x), y, {}, BoostObjective::logistic, TreeParams{2, 50, 0.1, 20, 1.0});
    const std::vector<double> lo{-1.5}, hi{1.5};
    CHECK(m.predict(lo) < 0.2);
    CHECK(m.predict(hi) > 0.8);
    CHECK(m.predict(lo) > 0.0);
  }

  TEST_CASE("zero weights drop rows") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 1, 100, 100}, w{1, 1, 0, 0};
    const auto m = fit_boosted(column_matrix(x), y, w, BoostObjective::squared, TreeParams{2, 20, 0.5, 1, 0.0});
    const std::vector<double> at{3.0};
    CHECK(m.predict(at) == doctest::Approx(1.0));
  }

  TEST_CASE("invalid inputs") {
    const std::vector<double> x{0, 1}, y{1};
    CHECK_CATEGORY(fit_boosted(column_matrix(x), y, {}, BoostObjective::squared, TreeParams{}), invalid_argument);
    const std::vector<double> y2{1, std::nan("")};
    CHECK_CATEGORY(fit_boosted(column_matrix(x), y2, {}, BoostObjective::squared, TreeParams{}), data_error);
  }
}
