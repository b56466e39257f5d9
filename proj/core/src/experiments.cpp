#include "causalcal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "causalcal/error.hpp"
#include "causalcal/folds.hpp"
#include "causalcal/losses.hpp"
#include "causalcal/parallel.hpp"
#include "causalcal/pipelines.hpp"

namespace causalcal {

std::string_view scale_name(ExperimentScale scale) {
  switch (scale) {
    case ExperimentScale::smoke: return "smoke";
    case ExperimentScale::acceptance: return "acceptance";
    case ExperimentScale::paper: return "paper";
  }
  return "smoke";
}

ExperimentScale parse_scale(std::string_view name) {
  if (name == "smoke") return ExperimentScale::smoke;
  if (name == "acceptance") return ExperimentScale::acceptance;
  if (name == "paper") return ExperimentScale::paper;
  throw Error(ErrorCategory::usage_error, "unknown scale '" + std::string(name) + "'");
}

QuantileExperimentConfig QuantileExperimentConfig::for_scale(ExperimentScale scale) {
  QuantileExperimentConfig c;
  switch (scale) {
    case ExperimentScale::smoke:
      c.sizes = {500};
      c.quantiles = {0.75};
      c.reps = 1;
      c.test_size = 1000;
      break;
    case ExperimentScale::acceptance:
      c.sizes = {1000};
      c.quantiles = {0.75};
      c.reps = 20;
      break;
    case ExperimentScale::paper:
      c.sizes = {500, 1000, 1500, 2000, 2500, 3000};
      c.quantiles = {0.6, 0.75, 0.9};
      c.reps = 50;
      break;
  }
  return c;
}

CateExperimentConfig CateExperimentConfig::for_scale(ExperimentScale scale) {
  CateExperimentConfig c;
  switch (scale) {
    case ExperimentScale::smoke:
      c.reps = 2;
      c.n = 1000;
      break;
    case ExperimentScale::acceptance:
      break;
    case ExperimentScale::paper:
      c.n = 10000;
      break;
  }
  return c;
}

namespace {

constexpr std::uint64_t kQuantileStream = 11;
constexpr std::uint64_t kCateStream = 12;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<double> predict_all(const Predictor& p, const Dataset& data) { return predict_rows(p, data); }

Predictor ensemble_predictor(BoostedEnsemble model, std::string desc) {
  auto shared = std::make_shared<const BoostedEnsemble>(std::move(model));
  return Predictor(std::move(desc), [shared](std::span<const double> x) { return shared->predict(x); });
}

/// Out-of-fold propensities on `data`.
std::vector<double> cross_fit_propensity(const Dataset& data, const Learner& learner, std::size_t k,
                                         const SeedStream& seed) {
  const FoldAssignment folds = split_folds(data.size(), k, seed.child(0));
  std::vector<double> out(data.size());
  for (std::size_t f = 0; f < k; ++f) {
    const auto train = folds.indices_out(f);
    const Predictor pi = fit_propensity(data.subset(train), Target::treatment, learner, learner.clip,
                                        seed.child(1 + f));
    for (std::size_t i : folds.indices_in(f)) out[i] = pi(data[i].x);
  }
  return out;
}

}  // namespace

QuantileRow run_quantile_rep(const QutDgp& dgp, std::size_t n, double quantile, std::size_t rep,
                             const QuantileExperimentConfig& cfg) {
  QuantileRow row;
  row.n = n;
  row.quantile = quantile;
  row.rep = rep;
  const SeedStream seed = derive_stream(cfg.seed, kQuantileStream).child(n).child(rep);
  const Dataset train = sample_qut(n, dgp, seed.child(1));
  const Dataset calib = sample_qut(n, dgp, seed.child(2));
  const Dataset test = sample_qut(cfg.test_size, dgp, seed.child(3));

  // Base model: inverse-propensity weighted pinball boosting on treated rows.
  const auto pi_hat = cross_fit_propensity(train, cfg.classifier, cfg.folds, seed.child(4));
  std::vector<double> weights(train.size()), target(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    weights[i] = train[i].a / pi_hat[i];
    target[i] = train[i].y;
  }
  const Predictor base = ensemble_predictor(
      fit_boosted(covariate_matrix(train), target, weights, BoostObjective::pinball, cfg.base_trees, quantile),
      "boosted pinball");

  PipelineConfig pc;
  pc.effect = Effect::qut;
  pc.folds = cfg.folds;
  pc.calibrator = CalibratorClass::linear;
  pc.quantile = quantile;
  pc.learners.outcome = cfg.classifier;
  pc.learners.propensity = cfg.classifier;
  pc.seed = seed.child(5).generator().next();
  const auto calib_base = predict_all(base, calib);
  const CalibrationResult result = calibrate_conditional_cross(calib, calib_base, pc);
  const auto& lin = result.model.as<LinearParams>();
  row.slope = lin.slope;
  row.intercept = lin.intercept;

  const auto pre_edges = evaluation_edges(calib_base, cfg.eval_bins);
  const auto post_edges = evaluation_edges(result.model.apply(calib_base), cfg.eval_bins);

  std::vector<QutEvalPoint> pre(test.size()), post(test.size());
  double pre_loss = 0.0, post_loss = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& z = test[i];
    const double p0 = 1.0 / dgp.propensity(z.x);
    const double b = base(z.x);
    const double c = result.model.apply(b);
    pre[i] = QutEvalPoint{b, z.a, z.y, p0};
    post[i] = QutEvalPoint{c, z.a, z.y, p0};
    const BoundLoss l = pinball_qut(quantile, p0, z.a, z.y);
    pre_loss += l.value(b);
    post_loss += l.value(c);
  }
  row.pre_cal_error = binned_qut_error(pre, pre_edges, quantile).estimate;
  row.post_cal_error = binned_qut_error(post, post_edges, quantile).estimate;
  row.pre_loss = pre_loss / static_cast<double>(test.size());
  row.post_loss = post_loss / static_cast<double>(test.size());
  return row;
}

QuantileExperimentResult run_quantile_experiment(const QuantileExperimentConfig& cfg) {
  if (cfg.reps == 0) throw Error(ErrorCategory::invalid_argument, "need at least one replicate");
  for (std::size_t n : cfg.sizes) {
    if (n < 2 * cfg.folds) throw Error(ErrorCategory::invalid_argument, "sample size below twice the fold count");
  }
  for (double q : cfg.quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCategory::invalid_argument, "quantiles must lie in (0, 1)");
  }
  struct Job {
    std::size_t n;
    double q;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t n : cfg.sizes) {
    for (double q : cfg.quantiles) {
      for (std::size_t r = 0; r < cfg.reps; ++r) jobs.push_back({n, q, r});
    }
  }
  QuantileExperimentResult result;
  result.rows.resize(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t j) {
        const Job& job = jobs[j];
        const QutDgp dgp = QutDgp::draw(derive_stream(cfg.seed, kQuantileStream).child(job.rep));
        try {
          result.rows[j] = run_quantile_rep(dgp, job.n, job.q, job.rep, cfg);
        } catch (const std::exception& e) {
          QuantileRow row;
          row.n = job.n;
          row.quantile = job.q;
          row.rep = job.rep;
          row.status = "failed";
          if (const auto* err = dynamic_cast<const Error*>(&e)) {
            row.error = std::string(category_name(err->category())) + ": " + e.what();
          } else {
            row.error = e.what();
          }
          result.rows[j] = row;
        }
      },
      cfg.threads);

  for (std::size_t n : cfg.sizes) {
    for (double q : cfg.quantiles) {
      QuantileSummary s;
      s.n = n;
      s.quantile = q;
      std::vector<double> pre_c, post_c, pre_l, post_l, diff;
      for (const auto& r : result.rows) {
        if (r.n != n || r.quantile != q) continue;
        if (r.status != "ok") {
          ++s.failed_reps;
          continue;
        }
        ++s.ok_reps;
        pre_c.push_back(r.pre_cal_error);
        post_c.push_back(r.post_cal_error);
        pre_l.push_back(r.pre_loss);
        post_l.push_back(r.post_loss);
        diff.push_back(r.pre_cal_error - r.post_cal_error);
      }
      if (s.ok_reps > 0) {
        s.pre_cal = mean_band(pre_c);
        s.post_cal = mean_band(post_c);
        s.pre_loss = mean_band(pre_l);
        s.post_loss = mean_band(post_l);
        const MeanBand d = mean_band(diff);
        if (d.count > 1 && d.sd > 0.0) {
          s.paired_z = d.mean / (d.sd / std::sqrt(static_cast<double>(d.count)));
        }
        if (s.pre_loss.mean != 0.0) s.relative_loss_change = s.post_loss.mean / s.pre_loss.mean - 1.0;
      }
      result.summaries.push_back(s);
    }
  }
  return result;
}

CateExperimentResult run_cate_experiment(const CateExperimentConfig& cfg) {
  if (cfg.reps == 0) throw Error(ErrorCategory::invalid_argument, "need at least one replicate");
  if (!(cfg.train_fraction > 0.0 && cfg.calib_fraction > 0.0 && cfg.train_fraction + cfg.calib_fraction < 1.0)) {
    throw Error(ErrorCategory::invalid_argument, "split fractions must be positive and sum below one");
  }
  static const std::vector<std::string> kNames{"uncalibrated", "isotonic", "binning", "linear"};
  std::vector<std::vector<CateRow>> per_rep(cfg.reps);

  parallel_for(
      cfg.reps,
      [&](std::size_t rep) {
        const SeedStream seed = derive_stream(cfg.seed, kCateStream).child(rep);
        auto fail_all = [&](const std::string& msg) {
          per_rep[rep].clear();
          for (const auto& name : kNames) per_rep[rep].push_back(CateRow{rep, name, "failed", msg, 0.0});
        };
        try {
          const Dataset data = cfg.data ? *cfg.data : cfg.dgp.sample(cfg.n, seed.child(1));
          const std::size_t n = data.size();
          std::vector<std::size_t> perm(n);
          std::iota(perm.begin(), perm.end(), std::size_t{0});
          seed.child(2).generator().shuffle(perm);
          const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n)));
          const auto n_calib = static_cast<std::size_t>(std::floor(cfg.calib_fraction * static_cast<double>(n)));
          const std::vector<std::size_t> i_train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
          const std::vector<std::size_t> i_calib(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                                                 perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_calib));
          const std::vector<std::size_t> i_test(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_calib),
                                                perm.end());
          const Dataset train = data.subset(i_train);
          const Dataset calib = data.subset(i_calib);
          const Dataset test = data.subset(i_test);

          PipelineConfig pc;
          pc.effect = Effect::cate;
          pc.folds = cfg.folds;
          pc.bins = cfg.binning_bins;
          pc.learners.outcome = cfg.outcome;
          pc.learners.propensity = cfg.propensity;

          // Biased DR-learner base model.
          pc.seed = seed.child(3).generator().next();
          const std::vector<double> zeros(train.size(), 0.0);
          const PseudoBatch train_pseudo = cross_pseudo_outcomes(train, zeros, pc);
          std::vector<double> chi(train.size());
          for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = train_pseudo.samples[i].chi;
          const Predictor fitted = ensemble_predictor(
              fit_boosted(covariate_matrix(train), chi, {}, BoostObjective::squared, cfg.outcome.trees),
              "dr-learner");
          const double scale = cfg.bias_scale, shift = cfg.bias_shift;
          const Predictor base("biased dr-learner",
                               [fitted, scale, shift](std::span<const double> x) { return scale * fitted(x) + shift; });

          const auto calib_base = predict_rows(base, calib);
          const auto test_base = predict_rows(base, test);
          pc.seed = seed.child(4).generator().next();
          const PseudoBatch calib_pseudo = cross_pseudo_outcomes(calib, calib_base, pc);
          pc.seed = seed.child(5).generator().next();
          const PseudoBatch test_pseudo = cross_pseudo_outcomes(test, test_base, pc);

          auto evaluate = [&](const std::vector<double>& calib_preds, const std::vector<double>& test_preds) {
            const auto edges = evaluation_edges(calib_preds, 4);
            std::vector<PseudoSample> samples = test_pseudo.samples;
            for (std::size_t i = 0; i < samples.size(); ++i) samples[i].base_pred = test_preds[i];
            return binned_cal_error(samples, edges).estimate;
          };

          std::vector<CateRow> rows;
          rows.push_back(CateRow{rep, "uncalibrated", "ok", "", evaluate(calib_base, test_base)});
          for (CalibratorClass cls : {CalibratorClass::isotonic, CalibratorClass::binning, CalibratorClass::linear}) {
            CateRow r{rep, std::string(calibrator_class_name(cls)), "ok", "", 0.0};
            try {
              PipelineConfig c = pc;
              c.calibrator = cls;
              const CalibratorModel model = fit_universal_calibrator(calib_pseudo.samples, c);
              r.cal_error = evaluate(model.apply(calib_base), model.apply(test_base));
            } catch (const std::exception& e) {
              r.status = "failed";
              r.error = e.what();
            }
            rows.push_back(r);
          }
          per_rep[rep] = std::move(rows);
        } catch (const std::exception& e) {
          fail_all(e.what());
        }
      },
      cfg.threads);

  CateExperimentResult result;
  for (auto& rows : per_rep) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  for (const auto& name : kNames) {
    std::vector<double> values;
    for (const auto& r : result.rows) {
      if (r.calibrator == name && r.status == "ok") values.push_back(r.cal_error);
    }
    result.summaries.emplace_back(name, values.empty() ? BoxSummary{} : box_summary(values));
  }
  return result;
}

std::string quantile_rows_csv(const QuantileExperimentResult& result) {
  std::ostringstream os;
  os << "n,quantile,rep,status,pre_cal_error,post_cal_error,pre_loss,post_loss,slope,intercept,error\n";
  for (const auto& r : result.rows) {
    os << r.n << ',' << fmt(r.quantile) << ',' << r.rep << ',' << r.status << ',' << fmt(r.pre_cal_error) << ','
       << fmt(r.post_cal_error) << ',' << fmt(r.pre_loss) << ',' << fmt(r.post_loss) << ',' << fmt(r.slope) << ','
       << fmt(r.intercept) << ',' << csv_text(r.error) << '\n';
  }
  return os.str();
}

namespace {

nlohmann::ordered_json band_json(const MeanBand& b) {
  nlohmann::ordered_json j;
  j["count"] = b.count;
  j["mean"] = b.mean;
  j["sd"] = b.sd;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  return j;
}

nlohmann::ordered_json trees_json(const TreeParams& t) {
  nlohmann::ordered_json j;
  j["depth"] = t.depth;
  j["rounds"] = t.rounds;
  j["learning_rate"] = t.learning_rate;
  j["min_leaf"] = t.min_leaf;
  j["l2"] = t.l2;
  return j;
}

nlohmann::ordered_json learner_json(const Learner& l) {
  nlohmann::ordered_json j;
  j["kind"] = learner_kind_name(l.kind);
  j["depth"] = l.trees.depth;
  j["rounds"] = l.trees.rounds;
  j["learning_rate"] = l.trees.learning_rate;
  j["min_leaf"] = l.trees.min_leaf;
  j["l2"] = l.trees.l2;
  j["ridge_penalty"] = l.ridge_penalty;
  j["clip"] = l.clip;
  return j;
}

}  // namespace

nlohmann::ordered_json quantile_summary_json(const QuantileExperimentResult& result,
                                             const QuantileExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["suite"] = "quantile";
  nlohmann::ordered_json c;
  c["sizes"] = cfg.sizes;
  c["quantiles"] = cfg.quantiles;
  c["reps"] = cfg.reps;
  c["folds"] = cfg.folds;
  c["test_size"] = cfg.test_size;
  c["eval_bins"] = cfg.eval_bins;
  c["base_trees"] = trees_json(cfg.base_trees);
  c["classifier"] = learner_json(cfg.classifier);
  c["seed"] = cfg.seed;
  j["config"] = c;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : result.summaries) {
    nlohmann::ordered_json e;
    e["n"] = s.n;
    e["quantile"] = s.quantile;
    e["ok_reps"] = s.ok_reps;
    e["failed_reps"] = s.failed_reps;
    e["pre_cal_error"] = band_json(s.pre_cal);
    e["post_cal_error"] = band_json(s.post_cal);
    e["pre_loss"] = band_json(s.pre_loss);
    e["post_loss"] = band_json(s.post_loss);
    e["paired_z"] = s.paired_z;
    e["relative_loss_change"] = s.relative_loss_change;
    arr.push_back(e);
  }
  j["summaries"] = arr;
  return j;
}

std::string cate_rows_csv(const CateExperimentResult& result) {
  std::ostringstream os;
  os << "rep,calibrator,status,cal_error,error\n";
  for (const auto& r : result.rows) {
    os << r.rep << ',' << r.calibrator << ',' << r.status << ',' << fmt(r.cal_error) << ',' << csv_text(r.error)
       << '\n';
  }
  return os.str();
}

nlohmann::ordered_json cate_summary_json(const CateExperimentResult& result, const CateExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["suite"] = "cate";
  nlohmann::ordered_json c;
  c["reps"] = cfg.reps;
  c["n"] = cfg.data ? cfg.data->size() : cfg.n;
  c["source"] = cfg.data ? "dataset" : "synthetic";
  c["train_fraction"] = cfg.train_fraction;
  c["calib_fraction"] = cfg.calib_fraction;
  c["folds"] = cfg.folds;
  c["binning_bins"] = cfg.binning_bins;
  c["bias_scale"] = cfg.bias_scale;
  c["bias_shift"] = cfg.bias_shift;
  c["outcome"] = learner_json(cfg.outcome);
  c["propensity"] = learner_json(cfg.propensity);
  c["seed"] = cfg.seed;
  j["config"] = c;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [name, b] : result.summaries) {
    nlohmann::ordered_json e;
    e["count"] = b.count;
    e["median"] = b.median;
    e["q1"] = b.q1;
    e["q3"] = b.q3;
    e["whisker_low"] = b.whisker_low;
    e["whisker_high"] = b.whisker_high;
    e["mean"] = b.mean;
    s[name] = e;
  }
  j["summaries"] = s;
  return j;
}

}  // namespace causalcal
