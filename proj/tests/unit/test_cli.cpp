#include "helpers.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "causalcal/serialize.hpp"
#include "causalcal/synth.hpp"
#include "cli/cli.hpp"

using namespace causalcal;
using causalcal::cli::run_cli;
namespace fs = std::filesystem;

namespace {

cli::DataConfig xyz_config() {
  cli::DataConfig c;
  c.covariates = {"x"};
  return c;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

int run(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string synthetic_csv(std::size_t n) {
  const SyntheticCateDgp dgp{3, 1.0, false};
  const Dataset d = dgp.sample(n, derive_stream(8, 0));
  std::ostringstream os;
  os.precision(17);
  os << "x1,x2,x3,a,y,base\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& z = d[i];
    os << z.x[0] << ',' << z.x[1] << ',' << z.x[2] << ',' << z.a << ',' << z.y << ',' << 1.5 * dgp.tau(z.x) + 0.3 << '\n';
  }
  return os.str();
}

const char* kConfig = R"({"data": {"covariates": ["x1", "x2", "x3"], "base_prediction": "base"},
 "pipeline": {"effect": "cate", "folds": 3, "learners": {"outcome": {"rounds": 10}, "propensity": {"rounds": 10}}}})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("CSV ingest") {
    const auto r = cli::ingest_csv_text("x,a,y\n0.5,1,2\n-1,0,3\n2,1,-4\n", xyz_config());
    REQUIRE(r.data.size() == 3);
    CHECK(r.data[1].x[0] == -1.0);
    CHECK(r.data[2].y == -4.0);
    CHECK(r.data[0].a == 1.0);
    CHECK_FALSE(r.pseudo_outcomes.has_value());
  }

  TEST_CASE("CSV errors name the row and column") {
    const auto bad = [] { cli::ingest_csv_text("x,a,y\n0,1,2\n1,2,3\n", xyz_config()); };
    CHECK(testing::category_of(bad) == ErrorCategory::data_error);
    CHECK(message_of(bad).find("row 2") != std::string::npos);
    const auto nan = [] { cli::ingest_csv_text("x,a,y\n0,1,abc\n", xyz_config()); };
    CHECK(testing::category_of(nan) == ErrorCategory::data_error);
    CHECK(message_of(nan).find("column 'y'") != std::string::npos);
    CHECK_CATEGORY(cli::ingest_csv_text("x,a\n0,1\n", xyz_config()), config_error);
    CHECK_CATEGORY(cli::ingest_csv_text("x,a,y\n", xyz_config()), data_error);
  }

  TEST_CASE("config parsing") {
    CHECK_CATEGORY(cli::parse_data_config(nlohmann::json{{"covariates", {"x", "y"}}}), config_error);
    CHECK_CATEGORY(cli::parse_data_config(nlohmann::json{{"covariates", nlohmann::json::array()}}), config_error);
    const auto dc = cli::parse_data_config(nlohmann::json{{"covariates", {"u"}}, {"outcome", "v"}});
    CHECK(dc.outcome == "v");
    CHECK(dc.treatment == "a");
    const auto rc = cli::parse_run_config(nlohmann::json{{"calibrator", "linear"}, {"folds", 3}, {"mode", "split"}});
    CHECK(rc.pipeline.calibrator == CalibratorClass::linear);
    CHECK(rc.pipeline.folds == 3);
    CHECK(rc.mode == cli::CalibrationMode::split);
    CHECK_CATEGORY(cli::parse_run_config(nlohmann::json{{"calibrator", "spline"}}), config_error);
    CHECK_CATEGORY(cli::parse_run_config(nlohmann::json{{"mode", "fast"}}), config_error);
    const Learner l = cli::parse_learner(nlohmann::json{{"depth", 2}, {"clip", 0.1}}, Learner{});
    CHECK(l.trees.depth == 2);
    CHECK(l.clip == 0.1);
    CHECK_CATEGORY(cli::parse_learner(nlohmann::json{{"clip", 0.7}}, Learner{}), config_error);
  }

  TEST_CASE("usage errors exit with 2") {
    std::string out, err;
    CHECK(run({}, &out, &err) == 2);
    CHECK(err.find("usage-error") != std::string::npos);
    CHECK(run({"experiment", "--suite", "nope", "--out", "x"}) == 2);
    CHECK(run({"--version"}, &out) == 0);
    CHECK(out == "0.1.0\n");
    TempDir dir("causalcal_cli_usage");
    write(dir.path / "d.csv", synthetic_csv(50));
    write(dir.path / "c.json", kConfig);
    CHECK(run({"calibrate", "--data", (dir.path / "d.csv").string(), "--config", (dir.path / "c.json").string(),
               "--effect", "qut", "--out", (dir.path / "o").string()},
              &out, &err) == 2);
    CHECK(err.find("usage-error") != std::string::npos);
  }

  TEST_CASE("evaluate against a pseudo-outcome column") {
    TempDir dir("causalcal_cli_eval");
    std::ostringstream perfect, shifted;
    perfect << "x,a,y,base,chi\n";
    shifted << "x,a,y,base,chi\n";
    for (int i = 0; i < 8; ++i) {
      perfect << i << ",1,0," << i << ',' << i << '\n';
      shifted << i << ",0,0," << i << ',' << i + 1 << '\n';
    }
    write(dir.path / "perfect.csv", perfect.str());
    write(dir.path / "shifted.csv", shifted.str());
    write(dir.path / "c.json", R"({"data": {"covariates": ["x"], "base_prediction": "base", "pseudo_outcome": "chi"}})");
    ModelMeta meta;
    meta.extra["effect"] = "cate";
    meta.extra["dim"] = 1;
    write(dir.path / "m.json", dump_json(model_to_json(CalibratorModel(LinearParams{1.0, 0.0}, meta))));

    std::string out;
    const std::vector<std::string> common{"--model", (dir.path / "m.json").string(), "--config",
                                          (dir.path / "c.json").string()};
    auto args = [&](const std::string& csv) {
      std::vector<std::string> a{"evaluate", "--data", (dir.path / csv).string()};
      a.insert(a.end(), common.begin(), common.end());
      return a;
    };
    REQUIRE(run(args("perfect.csv"), &out) == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["estimate"].get<double>() < 1e-10);
    CHECK(j["target_source"] == "pseudo_outcome column");
    CHECK(j["flags"][0] == "edges_from_evaluation_data");
    CHECK(j["buckets"].size() == 4);
    REQUIRE(run(args("shifted.csv"), &out) == 0);
    j = nlohmann::json::parse(out);
    CHECK(j["estimate"].get<double>() == doctest::Approx(1.0));
  }

  TEST_CASE("calibrate writes deterministic artifacts") {
    TempDir dir("causalcal_cli_calibrate");
    write(dir.path / "d.csv", synthetic_csv(300));
    write(dir.path / "c.json", kConfig);
    const auto o = dir.path / "o";
    const std::vector<std::string> a{"calibrate", "--data", (dir.path / "d.csv").string(), "--config",
                                     (dir.path / "c.json").string(), "--calibrator", "binning", "--bins", "5",
                                     "--seed", "9", "--out", o.string()};
    REQUIRE(run(a) == 0);
    std::map<std::string, std::string> first;
    for (const char* f : {"model.json", "report.json", "manifest.json"}) {
      REQUIRE(fs::exists(o / f));
      first[f] = read_file(o / f);
    }
    REQUIRE(run(a) == 0);
    for (const auto& [f, bytes] : first) CHECK(read_file(o / f) == bytes);
    const auto model = model_from_json(nlohmann::json::parse(first["model.json"]));
    CHECK(model.cls() == CalibratorClass::binning);
    CHECK(model.meta().extra["effect"] == "cate");
    const auto manifest = nlohmann::json::parse(first["manifest.json"]);
    CHECK(manifest["command"] == "calibrate");
    CHECK(manifest["inputs"]["data"]["digest"] == hex64(file_digest(dir.path / "d.csv")));

    std::string out;
    REQUIRE(run({"evaluate", "--data", (dir.path / "d.csv").string(), "--model", (o / "model.json").string(),
                 "--config", (dir.path / "c.json").string()},
                &out) == 0);
    const auto rep = nlohmann::json::parse(out);
    bool in_sample = false;
    for (const auto& fl : rep["flags"]) in_sample = in_sample || fl == "in-sample";
    CHECK(in_sample);
  }

  TEST_CASE("runtime errors exit with 1 and a category") {
    TempDir dir("causalcal_cli_runtime");
    write(dir.path / "d.csv", "x1,x2,x3,a,y,base\n0,0,0,3,1,1\n");
    write(dir.path / "c.json", kConfig);
    std::string out, err;
    CHECK(run({"calibrate", "--data", (dir.path / "d.csv").string(), "--config", (dir.path / "c.json").string(),
               "--out", (dir.path / "o").string()},
              &out, &err) == 1);
    const auto j = nlohmann::json::parse(err);
    CHECK(j["error"]["category"] == "data-error");
  }
}
