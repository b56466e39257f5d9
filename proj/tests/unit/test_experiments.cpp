#include "helpers.hpp"

#include <sstream>

#include "causalcal/experiments.hpp"

using namespace causalcal;

namespace {

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("scale names") {
    for (auto s : {ExperimentScale::smoke, ExperimentScale::acceptance, ExperimentScale::paper}) {
      CHECK(parse_scale(scale_name(s)) == s);
    }
    CHECK_CATEGORY(parse_scale("huge"), usage_error);
    const auto paper = QuantileExperimentConfig::for_scale(ExperimentScale::paper);
    CHECK(paper.sizes.size() == 6);
    CHECK(paper.reps == 50);
  }

  TEST_CASE("quantile smoke run") {
    auto cfg = QuantileExperimentConfig::for_scale(ExperimentScale::smoke);
    cfg.seed = 3;
    const auto r = run_quantile_experiment(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].status == "ok");
    CHECK(r.rows[0].pre_cal_error >= 0.0);
    REQUIRE(r.summaries.size() == 1);
    CHECK(r.summaries[0].ok_reps == 1);
    const std::string csv = quantile_rows_csv(r);
    CHECK(csv.rfind("n,quantile,rep,status,", 0) == 0);
    CHECK(line_count(csv) == 2);
    const auto j = quantile_summary_json(r, cfg);
    CHECK(j["suite"] == "quantile");
    CHECK(j["summaries"].size() == 1);
    CHECK(quantile_rows_csv(run_quantile_experiment(cfg)) == csv);
  }

  TEST_CASE("CATE smoke run is independent of thread count") {
    auto cfg = CateExperimentConfig::for_scale(ExperimentScale::smoke);
    cfg.seed = 5;
    cfg.threads = 1;
    const auto a = run_cate_experiment(cfg);
    cfg.threads = 2;
    const auto b = run_cate_experiment(cfg);
    CHECK(cate_rows_csv(a) == cate_rows_csv(b));
    CHECK(a.rows.size() == 2 * 4);
    REQUIRE(a.summaries.size() == 4);
    CHECK(a.summaries[0].first == "uncalibrated");
    const auto j = cate_summary_json(a, cfg);
    CHECK(j["config"]["source"] == "synthetic");
    CHECK(j["summaries"].size() == 4);
  }
}
