#include "helpers.hpp"

#include <filesystem>

#include "causalcal/serialize.hpp"

using namespace causalcal;

TEST_SUITE("serialize") {
  TEST_CASE("FNV-1a digests") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
    CHECK(hex64(1) == "0000000000000001");
  }

  TEST_CASE("model round trips") {
    ModelMeta meta;
    meta.add_flag("strict");
    meta.merged_buckets = 2;
    meta.extra["effect"] = "cate";
    const std::vector<CalibratorModel> models{
        CalibratorModel(IsotonicParams{{0.1, 0.7}, {-1.0 / 3.0, 2.5}, 1e-9}, meta),
        CalibratorModel(BinningParams{{0.5}, {1.0, 2.0}}),
        CalibratorModel(LinearParams{0.1, -0.7}),
        CalibratorModel(PlattParams{-1.25, 0.3})};
    for (const auto& m : models) {
      const auto j = model_to_json(m);
      const auto back = model_from_json(nlohmann::json::parse(dump_json(j)));
      CHECK(back.cls() == m.cls());
      CHECK(model_to_json(back) == j);
      for (double x : {-2.0, 0.1, 0.3, 5.0}) CHECK(back.apply(x) == m.apply(x));
    }
    const auto back = model_from_json(nlohmann::json::parse(dump_json(model_to_json(models[0]))));
    CHECK(back.meta().has_flag("strict"));
    CHECK(back.meta().merged_buckets == 2);
    CHECK(back.meta().extra["effect"] == "cate");
  }

  TEST_CASE("malformed models") {
    CHECK_CATEGORY(model_from_json(nlohmann::json::array()), config_error);
    CHECK_CATEGORY(model_from_json(nlohmann::json{{"class", "linear"}}), config_error);
    CHECK_CATEGORY(model_from_json(nlohmann::json{{"class", "binning"}, {"params", {{"edges", {1.0}}, {"levels", {1.0}}}}}),
                   config_error);
    CHECK_CATEGORY(model_from_json(nlohmann::json{{"class", "linear"}, {"params", {{"slope", "x"}, {"intercept", 0}}}}),
                   config_error);
    CHECK_CATEGORY(model_from_json(nlohmann::json{{"class", "spline"}, {"params", nlohmann::json::object()}}),
                   config_error);
  }

  TEST_CASE("report JSON") {
    BinnedCalReport r;
    r.edges = {1.0};
    r.buckets = {BinnedBucket{2, 0.5, 0.7, 0.2}, BinnedBucket{}};
    r.empty_buckets = 1;
    r.estimate = 0.04;
    const auto j = report_to_json(r);
    CHECK(j["estimate"] == 0.04);
    CHECK(j["buckets"].size() == 2);
    CHECK(j["buckets"][0]["count"] == 2);
  }

  TEST_CASE("file helpers") {
    const auto dir = std::filesystem::temp_directory_path() / "causalcal_serialize_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "x.txt";
    write_file_atomic(path, "a");
    CHECK(read_file(path) == "a");
    CHECK(file_digest(path) == fnv1a64("a"));
    write_file_atomic(path, "bb");
    CHECK(read_file(path) == "bb");
    std::filesystem::remove_all(dir);
    CHECK_CATEGORY(read_file(dir / "missing"), io_error);
  }
}
