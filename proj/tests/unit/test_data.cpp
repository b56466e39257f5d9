#include "helpers.hpp"

#include <cmath>
#include <limits>

#include "causalcal/data.hpp"
#include "causalcal/predictor.hpp"

using namespace causalcal;

TEST_SUITE("data") {
  TEST_CASE("dataset keeps rows and base predictions in order") {
    std::vector<Observation> rows{{{0.1, 0.2}, 1.0, std::nullopt, 3.0}, {{0.3, 0.4}, 0.0, std::nullopt, -1.0}};
    const Dataset d(Schema{2, TreatmentKind::binary, false}, rows, {0.5, 0.7});
    CHECK(d.size() == 2);
    CHECK(d[1].y == -1.0);
    CHECK(d.base_predictions()[1] == 0.7);
    const std::vector<std::size_t> idx{1, 0, 1};
    const Dataset s = d.subset(idx);
    CHECK(s.size() == 3);
    CHECK(s[0].x[0] == 0.3);
    CHECK(s.base_predictions()[1] == 0.5);
  }

  TEST_CASE("validation rejects malformed rows") {
    const Schema bin{1, TreatmentKind::binary, false};
    CHECK_CATEGORY(Dataset(bin, {{{1.0, 2.0}, 0.0, std::nullopt, 0.0}}), data_error);
    CHECK_CATEGORY(Dataset(bin, {{{1.0}, 2.0, std::nullopt, 0.0}}), data_error);
    CHECK_CATEGORY(Dataset(bin, {{{std::nan("")}, 1.0, std::nullopt, 0.0}}), data_error);
    CHECK_CATEGORY(Dataset(bin, {{{1.0}, 1.0, std::nullopt, std::numeric_limits<double>::infinity()}}), data_error);
    CHECK_CATEGORY(Dataset(bin, {{{1.0}, 1.0, 1.0, 0.0}}), data_error);
    const Schema iv{1, TreatmentKind::binary, true};
    CHECK_CATEGORY(Dataset(iv, {{{1.0}, 1.0, std::nullopt, 0.0}}), data_error);
    CHECK_CATEGORY(Dataset(iv, {{{1.0}, 1.0, 0.5, 0.0}}), data_error);
    const Schema cont{1, TreatmentKind::continuous, false};
    CHECK_NOTHROW(Dataset(cont, {{{1.0}, 0.25, std::nullopt, 0.0}}));
    CHECK_CATEGORY(Dataset(cont, {{{1.0}, 1.5, std::nullopt, 0.0}}), data_error);
    CHECK_CATEGORY(Dataset(bin, {{{1.0}, 1.0, std::nullopt, 0.0}}, {1.0, 2.0}), invalid_argument);
    CHECK_CATEGORY(Dataset(bin, {{{1.0}, 1.0, std::nullopt, 0.0}}, {std::nan("")}), data_error);
  }

  TEST_CASE("error message names the row") {
    const Schema bin{1, TreatmentKind::binary, false};
    try {
      Dataset(bin, {{{1.0}, 0.0, std::nullopt, 0.0}, {{1.0}, 2.0, std::nullopt, 0.0}});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
  }

  TEST_CASE("predictors") {
    const Predictor c = Predictor::constant(2.5);
    const std::vector<double> x{1.0};
    CHECK(c(x) == 2.5);
    const Predictor sum("sum", [](std::span<const double> v) { return v[0] + v[1]; });
    const Dataset d(Schema{2, TreatmentKind::binary, false}, {{{1.0, 2.0}, 0.0, std::nullopt, 0.0}});
    CHECK(predict_rows(sum, d) == std::vector<double>{3.0});
    CHECK(with_treatment(1.0, x) == std::vector<double>{1.0, 1.0});
    CHECK_CATEGORY(predict_rows(Predictor(), d), invalid_state);
  }
}
