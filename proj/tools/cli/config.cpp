#include "causalcal/error.hpp"
#include "cli/cli.hpp"

namespace causalcal::cli {

namespace {

template <class T>
T get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCategory::config_error, std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

Learner parse_learner(const nlohmann::json& j, Learner l) {
  if (!j.is_object()) throw Error(ErrorCategory::config_error, "learner config must be an object");
  if (j.contains("kind")) {
    try {
      l.kind = parse_learner_kind(get<std::string>(j, "kind", ""));
    } catch (const Error& e) {
      throw Error(ErrorCategory::config_error, e.what());
    }
  }
  l.trees.depth = get<int>(j, "depth", l.trees.depth);
  l.trees.rounds = get<int>(j, "rounds", l.trees.rounds);
  l.trees.learning_rate = get<double>(j, "learning_rate", l.trees.learning_rate);
  l.trees.min_leaf = get<std::size_t>(j, "min_leaf", l.trees.min_leaf);
  l.trees.l2 = get<double>(j, "l2", l.trees.l2);
  l.ridge_penalty = get<double>(j, "ridge_penalty", l.ridge_penalty);
  l.clip = get<double>(j, "clip", l.clip);
  if (l.trees.depth < 1 || l.trees.rounds < 0 || !(l.trees.learning_rate > 0.0) || l.trees.min_leaf < 1) {
    throw Error(ErrorCategory::config_error, "invalid tree parameters");
  }
  if (!(l.clip >= 0.0 && l.clip < 0.5)) throw Error(ErrorCategory::config_error, "clip must lie in [0, 1/2)");
  return l;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig rc;
  if (j.is_null()) return rc;
  if (!j.is_object()) throw Error(ErrorCategory::config_error, "pipeline config must be an object");
  auto& p = rc.pipeline;
  try {
    if (j.contains("effect")) rc.effect = parse_effect(get<std::string>(j, "effect", ""));
    if (j.contains("calibrator")) p.calibrator = parse_calibrator_class(get<std::string>(j, "calibrator", ""));
    if (j.contains("late_iv_sign")) p.late_iv_sign = parse_late_iv_sign(get<std::string>(j, "late_iv_sign", ""));
  } catch (const Error& e) {
    throw Error(ErrorCategory::config_error, e.what());
  }
  if (j.contains("mode")) {
    const auto m = get<std::string>(j, "mode", "");
    if (m == "split") rc.mode = CalibrationMode::split;
    else if (m == "cross") rc.mode = CalibrationMode::cross;
    else if (m == "umb3") rc.mode = CalibrationMode::umb3;
    else throw Error(ErrorCategory::config_error, "mode must be split, cross or umb3");
  }
  p.folds = get<std::size_t>(j, "folds", p.folds);
  p.bins = get<std::size_t>(j, "bins", p.bins);
  p.seed = get<std::uint64_t>(j, "seed", p.seed);
  if (j.contains("quantile") && !j["quantile"].is_null()) rc.quantile = get<double>(j, "quantile", 0.5);
  if (j.contains("pseudo_clip") && !j["pseudo_clip"].is_null()) p.pseudo_clip = get<double>(j, "pseudo_clip", 0.0);
  p.strict_slope = get<double>(j, "strict_slope", p.strict_slope);
  p.distinct_noise = get<double>(j, "distinct_noise", p.distinct_noise);
  if (j.contains("known_pi0") && !j["known_pi0"].is_null()) rc.known_pi0 = get<double>(j, "known_pi0", 0.5);
  if (j.contains("learners")) {
    const auto& l = j["learners"];
    if (l.contains("outcome")) p.learners.outcome = parse_learner(l["outcome"], p.learners.outcome);
    if (l.contains("propensity")) p.learners.propensity = parse_learner(l["propensity"], p.learners.propensity);
  }
  if (p.learners.outcome.kind == LearnerKind::oracle) {
    throw Error(ErrorCategory::config_error, "oracle learners cannot be configured from a file");
  }
  return rc;
}

}  // namespace causalcal::cli
