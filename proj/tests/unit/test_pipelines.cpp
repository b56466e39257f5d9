#include "helpers.hpp"

#include <cmath>

#include "causalcal/pipelines.hpp"
#include "causalcal/synth.hpp"

using namespace causalcal;

namespace {

struct CateFixture {
  DiscreteCateDgp dgp = DiscreteCateDgp::standard();
  DiscreteOracle oracle = dgp.to_oracle();
  Dataset data;
  std::vector<double> base;
  PipelineConfig cfg;

  explicit CateFixture(std::size_t n) {
    data = dgp.sample(n, derive_stream(11, 0));
    const auto theta = dgp.theta0();
    for (std::size_t i = 0; i < data.size(); ++i) base.push_back(2.0 * theta[oracle.index_of(data[i].x)] + 1.0);
    const auto g = dgp.true_nuisances(oracle);
    cfg.learners.outcome.kind = LearnerKind::oracle;
    cfg.learners.oracle = g.components();
    cfg.seed = 4;
  }
};

Dataset small_qut(std::size_t n, QutDgp& dgp) {
  dgp = QutDgp::draw(derive_stream(21, 0), 4, 2);
  return sample_qut(n, dgp, derive_stream(21, 1));
}

}  // namespace

TEST_SUITE("pipelines") {
  TEST_CASE("linear cross calibration undoes an affine distortion") {
    CateFixture f(20000);
    f.cfg.calibrator = CalibratorClass::linear;
    const auto r = calibrate_universal_cross(f.data, f.base, f.cfg);
    CHECK(r.model.as<LinearParams>().slope == doctest::Approx(0.5).epsilon(0.15));
    CHECK(r.model.apply(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(0.15));
    CHECK(r.report["diagnostics"].contains("pseudo_outcomes"));
  }

  TEST_CASE("universal pipelines are deterministic") {
    CateFixture f(600);
    for (auto cls : {CalibratorClass::isotonic, CalibratorClass::binning}) {
      f.cfg.calibrator = cls;
      f.cfg.bins = 5;
      const auto a = calibrate_universal_cross(f.data, f.base, f.cfg);
      const auto b = calibrate_universal_cross(f.data, f.base, f.cfg);
      for (double x : {-1.0, 0.3, 1.7, 3.0}) CHECK(a.model.apply(x) == b.model.apply(x));
      const auto s = calibrate_universal_split(f.data, f.base, f.cfg);
      const auto t = calibrate_universal_split(f.data, f.base, f.cfg);
      CHECK(s.report.dump() == t.report.dump());
    }
  }

  TEST_CASE("bins are reduced to the sample size") {
    CateFixture f(8);
    f.cfg.calibrator = CalibratorClass::binning;
    f.cfg.bins = 50;
    f.cfg.folds = 2;
    const auto r = calibrate_universal_cross(f.data, f.base, f.cfg);
    CHECK(r.model.meta().has_flag("bins_reduced_to_sample_size"));
  }

  TEST_CASE("configuration errors") {
    CateFixture f(100);
    PipelineConfig c = f.cfg;
    c.folds = 1;
    CHECK_CATEGORY(calibrate_universal_cross(f.data, f.base, c), config_error);
    CHECK_CATEGORY(calibrate_conditional_cross(f.data, f.base, f.cfg), config_error);
    c = f.cfg;
    c.effect = Effect::qut;
    CHECK_CATEGORY(calibrate_universal_cross(f.data, f.base, c), config_error);
    c.calibrator = CalibratorClass::binning;
    CHECK_CATEGORY(calibrate_conditional_cross(f.data, f.base, c), config_error);
    c.calibrator = CalibratorClass::linear;
    c.quantile = 1.5;
    CHECK_CATEGORY(calibrate_conditional_split(f.data, f.base, c), config_error);
    CHECK_CATEGORY(calibrate_universal_cross(f.data, std::vector<double>{1.0}, f.cfg), invalid_argument);
  }

  TEST_CASE("QUT loss points by hand") {
    Dataset d(Schema{1, TreatmentKind::binary, false}, {Observation{{0.0}, 1.0, std::nullopt, 1.0}});
    const std::vector<double> base{0.0}, p{2.0}, f{0.6};
    const auto pts = qut_loss_points(d, base, p, f, 0.75);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].loss.scale() == 2.0);
    CHECK(pts[0].loss.correction() == doctest::Approx(-0.15));
    CHECK(pts[0].pred == 0.0);
  }

  TEST_CASE("conditional QUT calibration") {
    QutDgp dgp;
    const Dataset data = small_qut(1500, dgp);
    std::vector<double> base;
    for (std::size_t i = 0; i < data.size(); ++i) base.push_back(0.5 * true_qut_quantile(dgp, data[i].x, 0.75));
    PipelineConfig cfg;
    cfg.effect = Effect::qut;
    cfg.quantile = 0.75;
    cfg.folds = 3;
    cfg.learners.outcome = Learner{LearnerKind::boosted_classification_trees, TreeParams{2, 30, 0.1, 10, 1.0}};
    cfg.learners.propensity = Learner{LearnerKind::boosted_classification_trees, TreeParams{2, 30, 0.1, 10, 1.0}};
    cfg.calibrator = CalibratorClass::isotonic;
    const auto iso = calibrate_conditional_cross(data, base, cfg);
    CHECK(iso.model.meta().has_flag("strict"));
    CHECK(iso.model.apply(1.0) > iso.model.apply(0.0));
    cfg.calibrator = CalibratorClass::linear;
    const auto lin = calibrate_conditional_split(data, base, cfg);
    CHECK(lin.model.as<LinearParams>().slope > 0.0);
    const auto again = calibrate_conditional_split(data, base, cfg);
    CHECK(again.model.as<LinearParams>().slope == lin.model.as<LinearParams>().slope);
  }

  TEST_CASE("three-way uniform mass binning") {
    CateFixture f(3000);
    f.cfg.bins = 6;
    const auto r = three_way_umb(f.data, f.base, f.cfg);
    const auto& levels = r.model.as<BinningParams>().levels;
    CHECK(levels.size() <= 6);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) CHECK(levels[i] != levels[j]);
    }
    PipelineConfig c = f.cfg;
    c.bins = 2000;
    CHECK_CATEGORY(three_way_umb(f.data, f.base, c), invalid_argument);
  }
}
