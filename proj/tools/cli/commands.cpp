#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "causalcal/error.hpp"
#include "causalcal/experiments.hpp"
#include "causalcal/metrics.hpp"
#include "causalcal/serialize.hpp"
#include "cli/cli.hpp"
#include "cli/diagnose.hpp"

namespace causalcal::cli {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kEvalBins = 4;

nlohmann::json load_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCategory::config_error, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

struct LoadedConfig {
  DataConfig data;
  RunConfig run;
  nlohmann::json raw;
};

LoadedConfig load_config(const fs::path& path) {
  LoadedConfig c;
  c.raw = load_json(path);
  if (!c.raw.is_object() || !c.raw.contains("data")) {
    throw Error(ErrorCategory::config_error, "config needs a 'data' object");
  }
  c.data = parse_data_config(c.raw["data"]);
  if (c.raw.contains("pipeline")) c.run = parse_run_config(c.raw["pipeline"]);
  return c;
}

ojson digest_entry(const fs::path& path) {
  ojson e;
  e["path"] = path.generic_string();
  e["digest"] = hex64(file_digest(path));
  return e;
}

const char* mode_name(CalibrationMode m) {
  switch (m) {
    case CalibrationMode::split: return "split";
    case CalibrationMode::cross: return "cross";
    case CalibrationMode::umb3: return "umb3";
  }
  return "cross";
}

void emit_error(std::ostream& err, std::string_view category, const std::string& message) {
  ojson j;
  j["error"]["category"] = category;
  j["error"]["message"] = message;
  err << j.dump() << "\n";
}

struct CalibrateFlags {
  std::string data, config, out;
  std::optional<std::string> effect, calibrator, mode, late_iv_sign;
  std::optional<std::size_t> folds, bins;
  std::optional<double> quantile;
  std::optional<std::uint64_t> seed;
};

int cmd_calibrate(const CalibrateFlags& f, std::ostream& out) {
  LoadedConfig cfg = load_config(f.config);
  RunConfig& rc = cfg.run;
  PipelineConfig& pc = rc.pipeline;

  if (f.effect) rc.effect = parse_effect(*f.effect);
  if (!rc.effect) throw Error(ErrorCategory::usage_error, "--effect is required when the config does not set one");
  pc.effect = *rc.effect;
  if (f.calibrator) pc.calibrator = parse_calibrator_class(*f.calibrator);
  if (f.mode) {
    if (*f.mode == "split") rc.mode = CalibrationMode::split;
    else if (*f.mode == "cross") rc.mode = CalibrationMode::cross;
    else rc.mode = CalibrationMode::umb3;
  }
  if (f.folds) pc.folds = *f.folds;
  if (f.bins) pc.bins = *f.bins;
  if (f.seed) pc.seed = *f.seed;
  if (f.late_iv_sign) pc.late_iv_sign = parse_late_iv_sign(*f.late_iv_sign);
  if (f.quantile) rc.quantile = *f.quantile;
  if (pc.effect == Effect::qut) {
    if (!rc.quantile) throw Error(ErrorCategory::usage_error, "the qut effect needs --q");
    if (!(*rc.quantile > 0.0 && *rc.quantile < 1.0)) {
      throw Error(ErrorCategory::usage_error, "--q must lie in (0, 1)");
    }
    pc.quantile = *rc.quantile;
  }
  if (pc.effect == Effect::late_known_pi) {
    if (!rc.known_pi0) {
      throw Error(ErrorCategory::config_error, "the late effect needs pipeline.known_pi0 in the config");
    }
    pc.learners.known_pi0 = Predictor::constant(*rc.known_pi0);
  }
  if (!cfg.data.base_prediction) {
    throw Error(ErrorCategory::config_error, "data config needs a 'base_prediction' column to calibrate");
  }

  const IngestResult in = ingest_csv(f.data, cfg.data);
  const auto base = in.data.base_predictions();

  CalibrationResult res;
  if (rc.mode == CalibrationMode::umb3) {
    res = three_way_umb(in.data, base, pc);
  } else if (pc.effect == Effect::qut) {
    res = rc.mode == CalibrationMode::split ? calibrate_conditional_split(in.data, base, pc)
                                            : calibrate_conditional_cross(in.data, base, pc);
  } else {
    res = rc.mode == CalibrationMode::split ? calibrate_universal_split(in.data, base, pc)
                                            : calibrate_universal_cross(in.data, base, pc);
  }

  const std::vector<double> calibrated = res.model.apply(base);
  auto& extra = res.model.meta().extra;
  extra["effect"] = effect_name(pc.effect);
  if (pc.effect == Effect::qut) extra["quantile"] = pc.quantile;
  extra["dim"] = in.data.schema().dim;
  extra["mode"] = mode_name(rc.mode);
  extra["evaluation_edges"] = evaluation_edges(calibrated, kEvalBins);
  extra["data_digest"] = hex64(fnv1a64(read_file(f.data)));

  fs::create_directories(f.out);
  const fs::path model_path = fs::path(f.out) / "model.json";
  const fs::path report_path = fs::path(f.out) / "report.json";
  const fs::path manifest_path = fs::path(f.out) / "manifest.json";
  ojson report = res.report;
  report["mode"] = mode_name(rc.mode);
  write_file_atomic(model_path, dump_json(model_to_json(res.model)));
  write_file_atomic(report_path, dump_json(report));

  ojson m;
  m["command"] = "calibrate";
  m["tool_version"] = kToolVersion;
  m["seed"] = pc.seed;
  ojson echo;
  echo["data"] = data_config_to_json(cfg.data);
  echo["pipeline"] = config_to_json(pc);
  echo["mode"] = mode_name(rc.mode);
  m["config"] = echo;
  m["inputs"] = ojson::object({{"data", digest_entry(f.data)}, {"config", digest_entry(f.config)}});
  m["outputs"] = ojson::object({{"model", digest_entry(model_path)}, {"report", digest_entry(report_path)}});
  write_file_atomic(manifest_path, dump_json(m));
  out << dump_json(m);
  return 0;
}

struct EvaluateFlags {
  std::string data, model, config;
  std::optional<std::string> out;
  std::size_t bins = kEvalBins;
  std::optional<std::uint64_t> seed;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  const LoadedConfig cfg = load_config(f.config);
  const CalibratorModel model = model_from_json(load_json(f.model));
  const auto& extra = model.meta().extra;
  if (!extra.contains("effect") || !extra.contains("dim")) {
    throw Error(ErrorCategory::config_error, "model does not record its effect and covariate dimension");
  }
  const Effect effect = parse_effect(extra["effect"].get<std::string>());
  if (cfg.run.effect && *cfg.run.effect != effect) {
    throw Error(ErrorCategory::config_error, "config effect does not match the model's effect");
  }
  if (extra["dim"].get<std::size_t>() != cfg.data.covariates.size()) {
    throw Error(ErrorCategory::config_error, "model covariate dimension does not match the data config");
  }
  if (!cfg.data.base_prediction) {
    throw Error(ErrorCategory::config_error, "data config needs a 'base_prediction' column to evaluate");
  }
  if (f.bins < 1) throw Error(ErrorCategory::usage_error, "--bins must be positive");

  const std::string bytes = read_file(f.data);
  const IngestResult in = ingest_csv_text(bytes, cfg.data);
  const auto base = in.data.base_predictions();
  const std::vector<double> preds = model.apply(base);

  std::vector<std::string> flags;
  std::vector<double> edges;
  if (extra.contains("evaluation_edges") && extra["evaluation_edges"].size() + 1 == f.bins) {
    edges = extra["evaluation_edges"].get<std::vector<double>>();
  } else {
    edges = evaluation_edges(preds, f.bins);
    flags.push_back("edges_from_evaluation_data");
  }
  if (extra.contains("data_digest") && extra["data_digest"] == hex64(fnv1a64(bytes))) flags.push_back("in-sample");

  PipelineConfig pc = cfg.run.pipeline;
  pc.effect = effect;
  if (f.seed) pc.seed = *f.seed;
  if (cfg.run.known_pi0) pc.learners.known_pi0 = Predictor::constant(*cfg.run.known_pi0);

  BinnedCalReport report;
  if (effect == Effect::qut) {
    const double q = extra.contains("quantile") ? extra["quantile"].get<double>() : 0.5;
    const FoldAssignment assign = split_folds(in.data.size(), pc.folds, derive_stream(pc.seed, 1));
    const auto folds = cross_fit(in.data, Effect::qut, pc.learners, assign, derive_stream(pc.seed, 2), base);
    std::vector<QutEvalPoint> pts(in.data.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& z = in.data[i];
      const double p = folds[assign.fold_of[i]].nuisances.at("p")(z.x);
      pts[i] = QutEvalPoint{preds[i], z.a, z.y, p};
    }
    report = binned_qut_error(pts, edges, q);
  } else {
    std::vector<PseudoSample> samples;
    if (in.pseudo_outcomes) {
      for (std::size_t i = 0; i < preds.size(); ++i) samples.push_back(PseudoSample{preds[i], (*in.pseudo_outcomes)[i], 1.0});
    } else {
      samples = cross_pseudo_outcomes(in.data, preds, pc).samples;
    }
    report = binned_cal_error(samples, edges);
  }
  for (auto& fl : flags) report.flags.push_back(fl);

  ojson j;
  j["effect"] = effect_name(effect);
  j["model_class"] = calibrator_class_name(model.cls());
  j["rows"] = in.data.size();
  j["target_source"] = effect == Effect::qut ? "cross-fitted propensity"
                       : in.pseudo_outcomes  ? "pseudo_outcome column"
                                             : "cross-fitted pseudo-outcomes";
  const ojson body = report_to_json(report);
  for (const auto& [k, v] : body.items()) j[k] = v;
  const std::string text = dump_json(j);
  if (f.out) write_file_atomic(*f.out, text);
  out << text;
  return 0;
}

struct ExperimentFlags {
  std::string suite, scale = "smoke", out;
  std::uint64_t seed = 0;
  std::optional<std::string> data, config;
  std::size_t threads = 0;
};

int cmd_experiment(const ExperimentFlags& f, std::ostream& out) {
  const ExperimentScale scale = parse_scale(f.scale);
  fs::create_directories(f.out);
  const fs::path rows_path = fs::path(f.out) / (f.suite + "_rows.csv");
  const fs::path summary_path = fs::path(f.out) / (f.suite + "_summary.json");
  ojson m;
  m["command"] = "experiment";
  m["tool_version"] = kToolVersion;
  m["seed"] = f.seed;
  ojson inputs = ojson::object();
  if (f.suite == "quantile") {
    if (f.data) throw Error(ErrorCategory::usage_error, "--data applies to the cate suite only");
    auto cfg = QuantileExperimentConfig::for_scale(scale);
    cfg.seed = f.seed;
    cfg.threads = f.threads;
    const auto result = run_quantile_experiment(cfg);
    const ojson summary = quantile_summary_json(result, cfg);
    write_file_atomic(rows_path, quantile_rows_csv(result));
    write_file_atomic(summary_path, dump_json(summary));
    m["config"] = summary["config"];
  } else {
    auto cfg = CateExperimentConfig::for_scale(scale);
    cfg.seed = f.seed;
    cfg.threads = f.threads;
    if (f.data) {
      if (!f.config) throw Error(ErrorCategory::usage_error, "--data needs --config with the column roles");
      const LoadedConfig lc = load_config(*f.config);
      cfg.data = ingest_csv(*f.data, lc.data).data;
      if (cfg.data->schema().treatment != TreatmentKind::binary) {
        throw Error(ErrorCategory::config_error, "the cate suite needs a binary treatment");
      }
      inputs["data"] = digest_entry(*f.data);
      inputs["config"] = digest_entry(*f.config);
    }
    const auto result = run_cate_experiment(cfg);
    const ojson summary = cate_summary_json(result, cfg);
    write_file_atomic(rows_path, cate_rows_csv(result));
    write_file_atomic(summary_path, dump_json(summary));
    m["config"] = summary["config"];
  }
  m["suite"] = f.suite;
  m["scale"] = f.scale;
  m["inputs"] = inputs;
  m["outputs"] = ojson::object({{"rows", digest_entry(rows_path)}, {"summary", digest_entry(summary_path)}});
  write_file_atomic(fs::path(f.out) / "manifest.json", dump_json(m));
  out << dump_json(m);
  return 0;
}

struct DiagnoseFlags {
  std::string check;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

int cmd_diagnose(const DiagnoseFlags& f, std::ostream& out) {
  ojson j;
  if (f.check == "orthogonality") j = diagnose_orthogonality(f.seed);
  else if (f.check == "theorem1") j = diagnose_theorem1(f.seed);
  else if (f.check == "convexity") j = diagnose_convexity(f.seed);
  else j = diagnose_umb_mass(f.seed);
  j["seed"] = f.seed;
  const std::string text = dump_json(j);
  if (f.out) write_file_atomic(*f.out, text);
  out << text;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal calibration of treatment-effect estimators", "causalcal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CalibrateFlags cf;
  auto* cal = app.add_subcommand("calibrate", "Fit a calibration map to base predictions");
  cal->add_option("--data", cf.data, "CSV file")->required()->check(CLI::ExistingFile);
  cal->add_option("--config", cf.config, "JSON config with data roles and pipeline settings")
      ->required()
      ->check(CLI::ExistingFile);
  cal->add_option("--effect", cf.effect)->check(CLI::IsMember({"cate", "acd", "late", "late-iv", "qut"}));
  cal->add_option("--calibrator", cf.calibrator)->check(CLI::IsMember({"isotonic", "binning", "linear", "platt"}));
  cal->add_option("--mode", cf.mode)->check(CLI::IsMember({"split", "cross", "umb3"}));
  cal->add_option("--folds", cf.folds)->check(CLI::Range(2, 1000));
  cal->add_option("--bins", cf.bins)->check(CLI::Range(1, 100000));
  cal->add_option("--q", cf.quantile, "Quantile level for qut");
  cal->add_option("--seed", cf.seed);
  cal->add_option("--late-iv-sign", cf.late_iv_sign)->check(CLI::IsMember({"printed", "flipped"}));
  cal->add_option("--out", cf.out, "Output directory")->required();

  EvaluateFlags ef;
  auto* ev = app.add_subcommand("evaluate", "Binned calibration error of a fitted model on held-out data");
  ev->add_option("--data", ef.data)->required()->check(CLI::ExistingFile);
  ev->add_option("--model", ef.model)->required()->check(CLI::ExistingFile);
  ev->add_option("--config", ef.config)->required()->check(CLI::ExistingFile);
  ev->add_option("--bins", ef.bins);
  ev->add_option("--seed", ef.seed);
  ev->add_option("--out", ef.out, "Report file");

  ExperimentFlags xf;
  auto* ex = app.add_subcommand("experiment", "Synthetic experiment suites");
  ex->add_option("--suite", xf.suite)->required()->check(CLI::IsMember({"quantile", "cate"}));
  ex->add_option("--scale", xf.scale)->check(CLI::IsMember({"smoke", "acceptance", "paper"}));
  ex->add_option("--seed", xf.seed);
  ex->add_option("--data", xf.data, "CSV for the cate suite")->check(CLI::ExistingFile);
  ex->add_option("--config", xf.config)->check(CLI::ExistingFile);
  ex->add_option("--threads", xf.threads);
  ex->add_option("--out", xf.out, "Output directory")->required();

  DiagnoseFlags df;
  auto* dg = app.add_subcommand("diagnose", "Exact diagnostics on finite models");
  dg->add_option("--check", df.check)
      ->required()
      ->check(CLI::IsMember({"orthogonality", "theorem1", "convexity", "umb-mass"}));
  dg->add_option("--seed", df.seed);
  dg->add_option("--out", df.out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage-error", e.what());
    return 2;
  }

  try {
    if (cal->parsed()) return cmd_calibrate(cf, out);
    if (ev->parsed()) return cmd_evaluate(ef, out);
    if (ex->parsed()) return cmd_experiment(xf, out);
    return cmd_diagnose(df, out);
  } catch (const Error& e) {
    emit_error(err, category_name(e.category()), e.what());
    return e.category() == ErrorCategory::usage_error ? 2 : 1;
  } catch (const std::exception& e) {
    emit_error(err, "internal-error", e.what());
    return 1;
  }
}

}  // namespace causalcal::cli
