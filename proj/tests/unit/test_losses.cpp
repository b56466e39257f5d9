#include "helpers.hpp"

#include <cmath>

#include "causalcal/losses.hpp"

using namespace causalcal;

namespace {

class QuadraticOracle final : public ConditionalLossOracle {
 public:
  explicit QuadraticOracle(std::vector<double> c) : c_(std::move(c)) {}
  std::size_t support_size() const override { return c_.size(); }
  double expected_loss(std::size_t i, double nu) const override { return 0.5 * c_[i] * nu * nu + nu; }

 private:
  std::vector<double> c_;
};

class AbsOracle final : public ConditionalLossOracle {
 public:
  std::size_t support_size() const override { return 1; }
  double expected_loss(std::size_t, double nu) const override { return std::abs(nu - 10.0); }
};

}  // namespace

TEST_SUITE("losses") {
  TEST_CASE("squared loss by hand") {
    const BoundLoss l = BoundLoss::squared(2.0, 3.0);
    CHECK(l.family() == LossFamily::squared);
    CHECK(l.value(5.0) == doctest::Approx(13.5));
    CHECK(l.derivative(5.0) == doctest::Approx(9.0));
    CHECK(l.reweighted(2.0).value(5.0) == doctest::Approx(27.0));
    CHECK(squared_pseudo_loss(1.0).value(3.0) == doctest::Approx(2.0));
  }

  TEST_CASE("corrected pinball loss by hand") {
    const BoundLoss l = BoundLoss::pinball(0.75, 2.0, 1.0, 0.1);
    CHECK(l.value(3.0) == doctest::Approx(0.7));
    CHECK(l.derivative(3.0) == doctest::Approx(0.4));
    CHECK(l.value(0.0) == doctest::Approx(1.5));
    CHECK(l.derivative(0.0) == doctest::Approx(-1.6));
    CHECK(l.derivative(1.0) == doctest::Approx(0.4));
  }

  TEST_CASE("QUT helpers") {
    CHECK(qut_correction(0.75, 2.0, 0.6, 1.0) == doctest::Approx(-0.15));
    CHECK(qut_correction(0.75, 2.0, 0.6, 0.0) == doctest::Approx(0.15));
    const BoundLoss plain = pinball_qut(0.75, 2.0, 0.0, 1.0);
    CHECK(plain.value(5.0) == 0.0);
    const BoundLoss c = corrected_pinball_qut(0.75, 2.0, 0.6, 1.0, 1.0);
    CHECK(c.correction() == doctest::Approx(-0.15));
    CHECK(c.scale() == 2.0);
    CHECK(c.value(1.0) == doctest::Approx(0.15));
  }

  TEST_CASE("parameter validation") {
    CHECK_CATEGORY(BoundLoss::squared(std::nan("")), invalid_argument);
    CHECK_CATEGORY(BoundLoss::pinball(1.0, 1.0, 0.0, 0.0), invalid_argument);
    CHECK_CATEGORY(BoundLoss::pinball(0.5, -1.0, 0.0, 0.0), invalid_argument);
  }

  TEST_CASE("default specs and binding") {
    CHECK(default_loss_spec(Effect::cate).kind == LossKind::cate);
    CHECK(default_loss_spec(Effect::late_iv).kind == LossKind::late_iv);
    CHECK(default_loss_spec(Effect::qut, 0.9).kind == LossKind::qut_corrected);
    CHECK(default_loss_spec(Effect::qut, 0.9).quantile == 0.9);
    const NuisanceSet g(Effect::cate, {{"mu0", Predictor::constant(1.0)},
                                       {"mu1", Predictor::constant(3.0)},
                                       {"pi", Predictor::constant(0.25)}});
    const BoundLoss l = bind_loss(default_loss_spec(Effect::cate), g, Observation{{0.0}, 1.0, std::nullopt, 4.0});
    CHECK(l.family() == LossFamily::squared);
    CHECK(l.target() == doctest::Approx(6.0));
    const NuisanceSet q(Effect::qut, {{"p", Predictor::constant(2.0)}, {"f", Predictor::constant(0.6)}});
    const BoundLoss lq = bind_loss(default_loss_spec(Effect::qut, 0.75), q, Observation{{0.0}, 1.0, std::nullopt, 1.0});
    CHECK(lq.correction() == doctest::Approx(-0.15));
    LossSpec plain{LossKind::qut_pinball, 0.75, {}};
    CHECK(bind_loss(plain, q, Observation{{0.0}, 1.0, std::nullopt, 1.0}).correction() == 0.0);
  }

  TEST_CASE("convexity measurement on a nonuniform grid") {
    const QuadraticOracle o({0.5, 2.0, 1.0});
    const std::vector<double> grid{-2.0, -1.5, -0.1, 0.0, 0.7, 3.0};
    const LossProperties p = measure_convexity(o, grid);
    CHECK(p.alpha == doctest::Approx(0.5));
    CHECK(p.beta == doctest::Approx(2.0));
    CHECK(p.strongly_convex());
    const LossProperties flat = measure_convexity(AbsOracle(), grid);
    CHECK(flat.alpha == doctest::Approx(0.0));
    CHECK_FALSE(flat.strongly_convex());
    const std::vector<double> short_grid{0.0, 1.0};
    CHECK_CATEGORY(measure_convexity(o, short_grid), invalid_argument);
    const std::vector<double> unsorted{0.0, 2.0, 1.0};
    CHECK_CATEGORY(measure_convexity(o, unsorted), invalid_argument);
  }
}
