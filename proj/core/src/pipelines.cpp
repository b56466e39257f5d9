#include "causalcal/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "causalcal/error.hpp"
#include "causalcal/losses.hpp"

namespace causalcal {

using ojson = nlohmann::ordered_json;

namespace {

// Stream ids used by every pipeline; fixed so reports are reproducible.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kNuisanceStream = 2;
constexpr std::uint64_t kDistinctStream = 4;

ojson learner_json(const Learner& l) {
  ojson j;
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

class StageClock {
 public:
  explicit StageClock(bool enabled) : enabled_(enabled), last_(std::chrono::steady_clock::now()) {}
  void mark(const std::string& stage) {
    if (!enabled_) return;
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  void attach(ojson& report) const {
    if (enabled_) report["timings_seconds"] = timings_;
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point last_;
  ojson timings_ = ojson::object();
};

void check_inputs(const Dataset& data, std::span<const double> base_preds) {
  if (data.empty()) throw Error(ErrorCategory::invalid_argument, "empty dataset");
  if (base_preds.size() != data.size()) {
    throw Error(ErrorCategory::invalid_argument, "base predictions do not match the data");
  }
  for (double v : base_preds) {
    if (!std::isfinite(v)) throw Error(ErrorCategory::data_error, "non-finite base prediction");
  }
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_context(name);
  }
}

ojson nuisance_json(const NuisanceSet& g) {
  ojson j = ojson::object();
  for (const auto& [name, p] : g.components()) j[name] = p.description();
  return j;
}

ojson pseudo_json(const PseudoBatch& batch) {
  double mean = 0.0, lo = 0.0, hi = 0.0;
  const auto& s = batch.samples;
  if (!s.empty()) {
    lo = hi = s.front().chi;
    for (const auto& p : s) {
      mean += p.chi;
      lo = std::min(lo, p.chi);
      hi = std::max(hi, p.chi);
    }
    mean /= static_cast<double>(s.size());
  }
  double var = 0.0;
  for (const auto& p : s) var += (p.chi - mean) * (p.chi - mean);
  if (s.size() > 1) var /= static_cast<double>(s.size() - 1);
  ojson j;
  j["count"] = s.size();
  j["mean"] = mean;
  j["sd"] = std::sqrt(var);
  j["min"] = lo;
  j["max"] = hi;
  j["clipped"] = batch.clipped;
  if (batch.clip_magnitude) j["clip_magnitude"] = *batch.clip_magnitude;
  else j["clip_magnitude"] = nullptr;
  return j;
}

ojson model_ref(const CalibratorModel& m) {
  ojson j;
  j["class"] = calibrator_class_name(m.cls());
  j["flags"] = m.meta().flags;
  j["merged_buckets"] = m.meta().merged_buckets;
  return j;
}

ojson base_report(const char* pipeline, const PipelineConfig& cfg, const Dataset& data) {
  ojson r;
  r["pipeline"] = pipeline;
  r["config"] = config_to_json(cfg);
  r["rows"] = data.size();
  return r;
}

PseudoOptions pseudo_options(const PipelineConfig& cfg) {
  PseudoOptions o;
  o.late_iv_sign = cfg.late_iv_sign;
  o.clip_magnitude = cfg.pseudo_clip;
  return o;
}

void require_universal(const PipelineConfig& cfg) {
  if (!is_universal(cfg.effect)) {
    throw Error(ErrorCategory::config_error,
                "effect '" + std::string(effect_name(cfg.effect)) + "' needs a conditional pipeline");
  }
}

void require_qut(const PipelineConfig& cfg) {
  if (cfg.effect != Effect::qut) {
    throw Error(ErrorCategory::config_error, "conditional pipelines support the qut effect only");
  }
  if (!(cfg.quantile > 0.0 && cfg.quantile < 1.0)) {
    throw Error(ErrorCategory::config_error, "quantile must lie in (0, 1)");
  }
  if (cfg.calibrator == CalibratorClass::binning || cfg.calibrator == CalibratorClass::platt) {
    throw Error(ErrorCategory::config_error,
                "calibrator '" + std::string(calibrator_class_name(cfg.calibrator)) +
                    "' is not injective for conditional calibration; use linear, isotonic or the umb3 mode");
  }
}

CalibratorModel fit_conditional(std::span<const LossPoint> points, const PipelineConfig& cfg) {
  CalibratorModel m = erm_calibrate(points, ErmClass{cfg.calibrator, cfg.bins});
  if (cfg.calibrator == CalibratorClass::isotonic) m = make_strict(m, cfg.strict_slope);
  return m;
}

void annotate_qut(ojson& report, const PipelineConfig& cfg) {
  report["notes"] = ojson::array({"auxiliary f estimated as P(Y <= base(X) | X, A = 1), not against the calibration function"});
  if (cfg.calibrator == CalibratorClass::isotonic) {
    report["notes"].push_back("isotonic map made strictly increasing with slope " + std::to_string(cfg.strict_slope));
  }
}

ojson loss_json(std::span<const LossPoint> points) {
  std::size_t treated = 0;
  double corr = 0.0;
  for (const auto& p : points) {
    treated += p.loss.scale() > 0.0;
    corr += p.loss.correction();
  }
  ojson j;
  j["count"] = points.size();
  j["treated"] = treated;
  j["mean_correction"] = points.empty() ? 0.0 : corr / static_cast<double>(points.size());
  return j;
}

}  // namespace

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
  ojson j;
  j["effect"] = effect_name(cfg.effect);
  j["folds"] = cfg.folds;
  j["calibrator"] = calibrator_class_name(cfg.calibrator);
  j["bins"] = cfg.bins;
  j["seed"] = cfg.seed;
  j["late_iv_sign"] = late_iv_sign_name(cfg.late_iv_sign);
  j["quantile"] = cfg.quantile;
  if (cfg.pseudo_clip) j["pseudo_clip"] = *cfg.pseudo_clip;
  else j["pseudo_clip"] = nullptr;
  j["strict_slope"] = cfg.strict_slope;
  j["distinct_noise"] = cfg.distinct_noise;
  ojson learners;
  learners["outcome"] = learner_json(cfg.learners.outcome);
  learners["propensity"] = learner_json(cfg.learners.propensity);
  ojson oracle = ojson::array();
  for (const auto& [name, p] : cfg.learners.oracle) oracle.push_back(name);
  learners["oracle_components"] = oracle;
  learners["known_pi0"] = cfg.learners.known_pi0.has_value();
  j["learners"] = learners;
  return j;
}

CalibratorModel fit_universal_calibrator(std::span<const PseudoSample> pseudo, const PipelineConfig& cfg) {
  switch (cfg.calibrator) {
    case CalibratorClass::isotonic: {
      std::vector<WeightedPoint> pts;
      pts.reserve(pseudo.size());
      for (const auto& s : pseudo) pts.push_back({s.base_pred, s.chi, s.weight});
      return pava(std::move(pts));
    }
    case CalibratorClass::binning: {
      const std::size_t bins = std::min(cfg.bins, pseudo.size());
      CalibratorModel m = binning_fit(pseudo, bins);
      if (bins < cfg.bins) m.meta().add_flag("bins_reduced_to_sample_size");
      return m;
    }
    case CalibratorClass::linear: return linear_fit(pseudo);
    case CalibratorClass::platt: return platt_fit(pseudo);
  }
  throw Error(ErrorCategory::config_error, "unknown calibrator");
}

CalibrationResult calibrate_universal_split(const Dataset& data, std::span<const double> base_preds,
                                            const PipelineConfig& cfg) {
  require_universal(cfg);
  check_inputs(data, base_preds);
  if (data.size() < 2) throw Error(ErrorCategory::invalid_argument, "sample splitting needs 2 rows");
  StageClock clock(cfg.record_timings);
  const HalfSplit halves = split_halves(data.size(), derive_stream(cfg.seed, kSplitStream));
  const Dataset first = data.subset(halves.first);
  const Dataset second = data.subset(halves.second);
  const NuisanceSet g = stage("nuisance", [&] {
    return fit_nuisances(first, cfg.effect, cfg.learners, derive_stream(cfg.seed, kNuisanceStream),
                         gather(base_preds, halves.first));
  });
  clock.mark("nuisance");
  const PseudoBatch batch = stage("pseudo-outcomes", [&] {
    return make_pseudo_dataset(second, gather(base_preds, halves.second), g, pseudo_options(cfg));
  });
  clock.mark("pseudo-outcomes");
  CalibrationResult out;
  out.model = stage("calibration", [&] { return fit_universal_calibrator(batch.samples, cfg); });
  clock.mark("calibration");
  ojson r = base_report("universal-split", cfg, data);
  r["splits"] = {{"nuisance", halves.first}, {"calibration", halves.second}};
  r["diagnostics"] = {{"nuisance_components", nuisance_json(g)}, {"pseudo_outcomes", pseudo_json(batch)}};
  r["model"] = model_ref(out.model);
  clock.attach(r);
  out.report = std::move(r);
  return out;
}

PseudoBatch cross_pseudo_outcomes(const Dataset& data, std::span<const double> base_preds,
                                  const PipelineConfig& cfg, FoldAssignment* folds_out) {
  require_universal(cfg);
  check_inputs(data, base_preds);
  if (cfg.folds < 2) throw Error(ErrorCategory::config_error, "cross calibration needs at least 2 folds");
  const FoldAssignment folds = split_folds(data.size(), cfg.folds, derive_stream(cfg.seed, kSplitStream));
  const auto nuisances = stage("nuisance", [&] {
    return cross_fit(data, cfg.effect, cfg.learners, folds, derive_stream(cfg.seed, kNuisanceStream), base_preds);
  });
  PseudoBatch batch = stage("pseudo-outcomes", [&] {
    return make_pseudo_dataset(data, base_preds, nuisances, folds, pseudo_options(cfg));
  });
  if (folds_out) *folds_out = folds;
  return batch;
}

CalibrationResult calibrate_universal_cross(const Dataset& data, std::span<const double> base_preds,
                                            const PipelineConfig& cfg) {
  StageClock clock(cfg.record_timings);
  FoldAssignment folds;
  const PseudoBatch batch = cross_pseudo_outcomes(data, base_preds, cfg, &folds);
  clock.mark("nuisance-and-pseudo-outcomes");
  CalibrationResult out;
  out.model = stage("calibration", [&] { return fit_universal_calibrator(batch.samples, cfg); });
  clock.mark("calibration");
  ojson r = base_report("universal-cross", cfg, data);
  r["folds"] = {{"k", folds.k}, {"sizes", folds.sizes()}, {"fold_of", folds.fold_of}};
  r["diagnostics"] = {{"pseudo_outcomes", pseudo_json(batch)}};
  r["model"] = model_ref(out.model);
  clock.attach(r);
  out.report = std::move(r);
  return out;
}

std::vector<LossPoint> qut_loss_points(const Dataset& data, std::span<const double> base_preds,
                                       std::span<const double> p, std::span<const double> f, double quantile) {
  std::vector<LossPoint> pts;
  pts.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    pts.push_back({base_preds[i], corrected_pinball_qut(quantile, p[i], f[i], data[i].a, data[i].y)});
  }
  return pts;
}

namespace {

std::pair<std::vector<double>, std::vector<double>> evaluate_pf(const Dataset& data, const NuisanceSet& g) {
  std::vector<double> p(data.size()), f(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    p[i] = g.at("p")(data[i].x);
    f[i] = g.at("f")(data[i].x);
  }
  return {p, f};
}

}  // namespace

CalibrationResult calibrate_conditional_split(const Dataset& data, std::span<const double> base_preds,
                                              const PipelineConfig& cfg) {
  require_qut(cfg);
  check_inputs(data, base_preds);
  if (data.size() < 2) throw Error(ErrorCategory::invalid_argument, "sample splitting needs 2 rows");
  StageClock clock(cfg.record_timings);
  const HalfSplit halves = split_halves(data.size(), derive_stream(cfg.seed, kSplitStream));
  const Dataset first = data.subset(halves.first);
  const Dataset second = data.subset(halves.second);
  const NuisanceSet g = stage("nuisance", [&] {
    return fit_nuisances(first, Effect::qut, cfg.learners, derive_stream(cfg.seed, kNuisanceStream),
                         gather(base_preds, halves.first));
  });
  clock.mark("nuisance");
  const auto second_preds = gather(base_preds, halves.second);
  const auto [p, f] = evaluate_pf(second, g);
  const auto points = qut_loss_points(second, second_preds, p, f, cfg.quantile);
  CalibrationResult out;
  out.model = stage("calibration", [&] { return fit_conditional(points, cfg); });
  clock.mark("calibration");
  ojson r = base_report("conditional-split", cfg, data);
  r["splits"] = {{"nuisance", halves.first}, {"calibration", halves.second}};
  r["diagnostics"] = {{"nuisance_components", nuisance_json(g)}, {"losses", loss_json(points)}};
  annotate_qut(r, cfg);
  r["model"] = model_ref(out.model);
  clock.attach(r);
  out.report = std::move(r);
  return out;
}

CalibrationResult calibrate_conditional_cross(const Dataset& data, std::span<const double> base_preds,
                                              const PipelineConfig& cfg) {
  require_qut(cfg);
  check_inputs(data, base_preds);
  if (cfg.folds < 2) throw Error(ErrorCategory::config_error, "cross calibration needs at least 2 folds");
  StageClock clock(cfg.record_timings);
  const FoldAssignment folds = split_folds(data.size(), cfg.folds, derive_stream(cfg.seed, kSplitStream));
  const auto nuisances = stage("nuisance", [&] {
    return cross_fit(data, Effect::qut, cfg.learners, folds, derive_stream(cfg.seed, kNuisanceStream), base_preds);
  });
  clock.mark("nuisance");
  std::vector<double> p(data.size()), f(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const NuisanceSet& g = nuisances[folds.fold_of[i]].nuisances;
    p[i] = g.at("p")(data[i].x);
    f[i] = g.at("f")(data[i].x);
  }
  const auto points = qut_loss_points(data, base_preds, p, f, cfg.quantile);
  CalibrationResult out;
  out.model = stage("calibration", [&] { return fit_conditional(points, cfg); });
  clock.mark("calibration");
  ojson r = base_report("conditional-cross", cfg, data);
  r["folds"] = {{"k", folds.k}, {"sizes", folds.sizes()}, {"fold_of", folds.fold_of}};
  r["diagnostics"] = {{"losses", loss_json(points)}};
  annotate_qut(r, cfg);
  r["model"] = model_ref(out.model);
  clock.attach(r);
  out.report = std::move(r);
  return out;
}

namespace {

/// Fills unset levels from the nearest set neighbor (left on ties).
bool inherit_levels(std::vector<double>& levels, const std::vector<char>& set) {
  bool any = false;
  const std::size_t B = levels.size();
  for (std::size_t b = 0; b < B; ++b) {
    if (set[b]) continue;
    any = true;
    bool found = false;
    for (std::size_t d = 1; d < B && !found; ++d) {
      if (b >= d && set[b - d]) { levels[b] = levels[b - d]; found = true; }
      else if (b + d < B && set[b + d]) { levels[b] = levels[b + d]; found = true; }
    }
    if (!found) throw Error(ErrorCategory::degenerate_data, "no bucket has usable observations");
  }
  return any;
}

/// QUT nuisances for the middle third: p from a propensity fit, f as the
/// probability that y falls below the bucket-wise preliminary level phi(x).
NuisanceSet umb_qut_nuisances(const Dataset& part, std::span<const double> preds, std::span<const double> edges,
                              const PipelineConfig& cfg, ojson& diag) {
  if (cfg.learners.outcome.kind == LearnerKind::oracle) {
    diag["phi"] = "oracle";
    return fit_nuisances(part, Effect::qut, cfg.learners, derive_stream(cfg.seed, kNuisanceStream), preds);
  }
  const SeedStream seed = derive_stream(cfg.seed, kNuisanceStream);
  const Learner& prop = cfg.learners.propensity;
  const Predictor pi = fit_propensity(part, Target::treatment, prop, prop.clip, seed.child(0));
  const std::size_t B = edges.size() + 1;
  std::vector<std::vector<BoundLoss>> groups(B);
  for (std::size_t i = 0; i < part.size(); ++i) {
    if (part[i].a != 1.0) continue;
    groups[bucket_of(edges, preds[i])].push_back(pinball_qut(cfg.quantile, 1.0 / pi(part[i].x), 1.0, part[i].y));
  }
  std::vector<double> phi(B, 0.0);
  std::vector<char> set(B, 0);
  for (std::size_t b = 0; b < B; ++b) {
    if (groups[b].empty()) continue;
    phi[b] = bucket_minimize(groups[b]);
    set[b] = 1;
  }
  inherit_levels(phi, set);
  diag["phi_levels"] = phi;
  std::vector<double> phi_rows(part.size());
  for (std::size_t i = 0; i < part.size(); ++i) phi_rows[i] = phi[bucket_of(edges, preds[i])];
  const Predictor f = fit_qut_auxiliary(part, phi_rows, cfg.quantile, prop, seed.child(1));
  std::map<std::string, Predictor> comps;
  comps.emplace("p", Predictor("inverse-propensity", [pi](std::span<const double> x) { return 1.0 / pi(x); }));
  comps.emplace("f", f);
  return NuisanceSet(Effect::qut, std::move(comps));
}

}  // namespace

CalibrationResult three_way_umb(const Dataset& data, std::span<const double> base_preds, const PipelineConfig& cfg) {
  check_inputs(data, base_preds);
  if (cfg.effect == Effect::qut && !(cfg.quantile > 0.0 && cfg.quantile < 1.0)) {
    throw Error(ErrorCategory::config_error, "quantile must lie in (0, 1)");
  }
  if (cfg.bins == 0) throw Error(ErrorCategory::config_error, "bin count must be positive");
  if (data.size() < 3) throw Error(ErrorCategory::invalid_argument, "three-way binning needs 3 nonempty thirds");
  StageClock clock(cfg.record_timings);
  const auto thirds = split_parts(data.size(), 3, derive_stream(cfg.seed, kSplitStream));
  for (const auto& t : thirds) {
    if (t.size() < cfg.bins) {
      throw Error(ErrorCategory::invalid_argument, "each third needs at least as many rows as bins");
    }
  }
  const UmbEdges edges = umb_edges(gather(base_preds, thirds[0]), cfg.bins);
  clock.mark("edges");
  const std::size_t B = edges.bins();

  const Dataset second = data.subset(thirds[1]);
  const Dataset third = data.subset(thirds[2]);
  const auto second_preds = gather(base_preds, thirds[1]);
  const auto third_preds = gather(base_preds, thirds[2]);
  ojson nuisance_diag = ojson::object();
  const NuisanceSet g = stage("nuisance", [&] {
    if (cfg.effect == Effect::qut) return umb_qut_nuisances(second, second_preds, edges.edges, cfg, nuisance_diag);
    return fit_nuisances(second, cfg.effect, cfg.learners, derive_stream(cfg.seed, kNuisanceStream), second_preds);
  });
  clock.mark("nuisance");

  std::vector<std::vector<BoundLoss>> groups(B);
  std::vector<std::size_t> counts(B, 0);
  if (cfg.effect == Effect::qut) {
    const auto [p, f] = evaluate_pf(third, g);
    const auto pts = qut_loss_points(third, third_preds, p, f, cfg.quantile);
    for (const auto& pt : pts) groups[bucket_of(edges.edges, pt.pred)].push_back(pt.loss);
  } else {
    const PseudoBatch batch = stage("pseudo-outcomes", [&] {
      return make_pseudo_dataset(third, third_preds, g, pseudo_options(cfg));
    });
    for (const auto& s : batch.samples) {
      groups[bucket_of(edges.edges, s.base_pred)].push_back(squared_pseudo_loss(s.chi, s.weight));
    }
  }
  std::vector<double> levels(B, 0.0);
  std::vector<char> set(B, 0);
  for (std::size_t b = 0; b < B; ++b) {
    counts[b] = groups[b].size();
    if (groups[b].empty()) continue;
    levels[b] = stage("bucket " + std::to_string(b), [&] { return bucket_minimize(groups[b]); });
    set[b] = 1;
  }
  ModelMeta meta;
  meta.merged_buckets = edges.merged;
  if (edges.merged > 0) meta.add_flag("merged_buckets");
  if (inherit_levels(levels, set)) meta.add_flag("empty_bucket_inherited");
  const auto distinct = ensure_distinct_levels(levels, cfg.distinct_noise, derive_stream(cfg.seed, kDistinctStream));
  if (distinct != levels) meta.add_flag("levels_perturbed");
  clock.mark("calibration");

  CalibrationResult out;
  out.model = CalibratorModel(BinningParams{edges.edges, distinct}, std::move(meta));
  ojson r = base_report("three-way-umb", cfg, data);
  r["splits"] = {{"edges", thirds[0]}, {"nuisance", thirds[1]}, {"calibration", thirds[2]}};
  r["diagnostics"] = {{"requested_bins", edges.requested_bins},
                      {"bins", B},
                      {"calibration_bucket_counts", counts},
                      {"nuisance", nuisance_diag}};
  if (cfg.effect == Effect::qut) annotate_qut(r, cfg);
  r["model"] = model_ref(out.model);
  clock.attach(r);
  out.report = std::move(r);
  return out;
}

CalibrationResult calibrate_universal_split(const Dataset& data, const Predictor& base, const PipelineConfig& cfg) {
  return calibrate_universal_split(data, predict_rows(base, data), cfg);
}
CalibrationResult calibrate_universal_cross(const Dataset& data, const Predictor& base, const PipelineConfig& cfg) {
  return calibrate_universal_cross(data, predict_rows(base, data), cfg);
}
CalibrationResult calibrate_conditional_split(const Dataset& data, const Predictor& base, const PipelineConfig& cfg) {
  return calibrate_conditional_split(data, predict_rows(base, data), cfg);
}
CalibrationResult calibrate_conditional_cross(const Dataset& data, const Predictor& base, const PipelineConfig& cfg) {
  return calibrate_conditional_cross(data, predict_rows(base, data), cfg);
}
CalibrationResult three_way_umb(const Dataset& data, const Predictor& base, const PipelineConfig& cfg) {
  return three_way_umb(data, predict_rows(base, data), cfg);
}

}  // namespace causalcal
