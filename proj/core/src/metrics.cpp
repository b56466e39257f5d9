#include "causalcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "causalcal/calibrators.hpp"
#include "causalcal/error.hpp"

namespace causalcal {

std::vector<double> evaluation_edges(std::span<const double> calibration_preds, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCategory::invalid_argument, "bin count must be positive");
  if (calibration_preds.empty()) throw Error(ErrorCategory::invalid_argument, "no calibration predictions");
  std::vector<double> s(calibration_preds.begin(), calibration_preds.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  std::vector<double> edges;
  for (std::size_t i = 1; i < bins; ++i) {
    const std::size_t k = i * n / bins;
    edges.push_back(k == 0 ? -std::numeric_limits<double>::infinity() : s[k - 1]);
  }
  return edges;
}

std::size_t evaluation_bucket(std::span<const double> edges, double pred) {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), pred) - edges.begin());
}

namespace {

void finish(BinnedCalReport& r) {
  double sum = 0.0;
  std::size_t nonempty = 0;
  for (const auto& b : r.buckets) {
    if (b.count == 0) {
      ++r.empty_buckets;
      continue;
    }
    ++nonempty;
    sum += b.gap * b.gap;
  }
  if (nonempty == 0) throw Error(ErrorCategory::evaluation_error, "every evaluation bucket is empty");
  r.estimate = sum / static_cast<double>(nonempty);
  if (r.empty_buckets > 0) r.flags.push_back("empty_buckets_dropped");
}

}  // namespace

BinnedCalReport binned_cal_error(std::span<const PseudoSample> samples, std::span<const double> edges) {
  if (samples.empty()) throw Error(ErrorCategory::evaluation_error, "empty test set");
  BinnedCalReport r;
  r.edges.assign(edges.begin(), edges.end());
  r.buckets.assign(edges.size() + 1, BinnedBucket{});
  for (const auto& s : samples) {
    auto& b = r.buckets[evaluation_bucket(edges, s.base_pred)];
    ++b.count;
    b.mean_pred += s.base_pred;
    b.mean_target += s.chi;
  }
  for (auto& b : r.buckets) {
    if (b.count == 0) continue;
    b.mean_pred /= static_cast<double>(b.count);
    b.mean_target /= static_cast<double>(b.count);
    b.gap = b.mean_target - b.mean_pred;
  }
  finish(r);
  return r;
}

BinnedCalReport binned_qut_error(std::span<const QutEvalPoint> points, std::span<const double> edges,
                                 double quantile) {
  if (points.empty()) throw Error(ErrorCategory::evaluation_error, "empty test set");
  BinnedCalReport r;
  r.edges.assign(edges.begin(), edges.end());
  r.buckets.assign(edges.size() + 1, BinnedBucket{});
  for (const auto& p : points) {
    auto& b = r.buckets[evaluation_bucket(edges, p.pred)];
    const double hit = p.y <= p.pred ? 1.0 : 0.0;
    ++b.count;
    b.mean_pred += p.pred;
    b.mean_target += p.a * p.p * hit;
    b.gap += p.a * p.p * (hit - quantile);
  }
  for (auto& b : r.buckets) {
    if (b.count == 0) continue;
    const auto c = static_cast<double>(b.count);
    b.mean_pred /= c;
    b.mean_target /= c;
    b.gap /= c;
  }
  finish(r);
  return r;
}

namespace {

std::vector<double> evaluate_on_support(const DiscreteOracle& oracle, const Predictor& theta) {
  std::vector<double> v(oracle.support_size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = theta(oracle.covariate(i));
  return v;
}

/// Support indices grouped by exact theta value.
std::map<double, std::vector<std::size_t>> level_sets(std::span<const double> theta) {
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < theta.size(); ++i) groups[theta[i]].push_back(i);
  return groups;
}

void check_theta(const DiscreteOracle& oracle, std::span<const double> theta) {
  if (theta.size() != oracle.support_size()) {
    throw Error(ErrorCategory::invalid_argument, "theta table does not match the oracle support");
  }
}

}  // namespace

std::vector<double> conditional_scores(const DiscreteOracle& oracle, std::span<const double> theta,
                                       const LossSpec& spec, const NuisanceSet& g) {
  check_theta(oracle, theta);
  std::vector<double> s(oracle.support_size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = oracle.conditional_mean(i, [&](const Observation& z) { return bind_loss(spec, g, z).derivative(theta[i]); });
  }
  return s;
}

double exact_cal_error(const DiscreteOracle& oracle, std::span<const double> theta_values,
                       const LossSpec& spec, const NuisanceSet& g) {
  const auto scores = conditional_scores(oracle, theta_values, spec, g);
  double total = 0.0;
  for (const auto& [level, idx] : level_sets(theta_values)) {
    double mass = 0.0, m = 0.0;
    for (std::size_t i : idx) {
      mass += oracle.prob(i);
      m += oracle.prob(i) * scores[i];
    }
    if (mass > 0.0) total += m * m / mass;
  }
  return std::sqrt(total);
}

double exact_cal_error(const DiscreteOracle& oracle, const Predictor& theta, const LossSpec& spec,
                       const NuisanceSet& g) {
  const auto v = evaluate_on_support(oracle, theta);
  return exact_cal_error(oracle, v, spec, g);
}

namespace {

std::vector<BoundLoss> weighted_losses(const DiscreteOracle& oracle, std::span<const std::size_t> idx,
                                       const LossSpec& spec, const NuisanceSet& g) {
  std::vector<BoundLoss> out;
  for (std::size_t i : idx) {
    for (const auto& atom : oracle.atoms(i)) {
      const double w = oracle.prob(i) * atom.prob;
      if (w == 0.0) continue;
      out.push_back(bind_loss(spec, g, oracle.observation(i, atom)).reweighted(w));
    }
  }
  return out;
}

}  // namespace

std::vector<double> conditional_minimizer(const DiscreteOracle& oracle, const LossSpec& spec,
                                          const NuisanceSet& g) {
  std::vector<double> out(oracle.support_size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t idx[] = {i};
    auto losses = weighted_losses(oracle, idx, spec, g);
    if (oracle.prob(i) == 0.0) {
      // Zero-mass covariates: minimize the conditional law itself.
      losses.clear();
      for (const auto& atom : oracle.atoms(i)) {
        if (atom.prob > 0.0) losses.push_back(bind_loss(spec, g, oracle.observation(i, atom)).reweighted(atom.prob));
      }
    }
    out[i] = bucket_minimize(losses);
  }
  return out;
}

std::vector<double> calibration_function(const DiscreteOracle& oracle, std::span<const double> theta_values,
                                         const LossSpec& spec, const NuisanceSet& g) {
  check_theta(oracle, theta_values);
  std::vector<double> out(oracle.support_size());
  for (const auto& [level, idx] : level_sets(theta_values)) {
    const auto losses = weighted_losses(oracle, idx, spec, g);
    const double v = losses.empty() ? level : bucket_minimize(losses);
    for (std::size_t i : idx) out[i] = v;
  }
  return out;
}

CanonicalPair canonical_pair(const NuisanceSet& g, const Observation& z, double quantile) {
  switch (g.effect()) {
    case Effect::cate: {
      const double pi = g.at("pi")(z.x);
      const double mu = z.a == 1.0 ? g.at("mu1")(z.x) : g.at("mu0")(z.x);
      return {mu, z.a / pi - (1.0 - z.a) / (1.0 - pi)};
    }
    case Effect::acd: {
      const auto ax = with_treatment(z.a, z.x);
      return {g.at("mu")(ax), g.at("score")(ax)};
    }
    case Effect::late_known_pi: {
      const double q = g.at("q")(z.x);
      const double d = z.d.value_or(0.0);
      return {g.at("p")(z.x) / q, z.a * (d - g.at("pi0")(z.x)) / q};
    }
    case Effect::qut:
      return {g.at("p")(z.x), z.a * (g.at("f")(z.x) - quantile)};
    case Effect::late_iv:
      break;
  }
  throw Error(ErrorCategory::invalid_argument, "no canonical score representation for this effect");
}

double cross_error(const DiscreteOracle& oracle, const NuisanceSet& g, const NuisanceSet& g0, double quantile) {
  double total = 0.0;
  for (std::size_t i = 0; i < oracle.support_size(); ++i) {
    total += oracle.prob(i) * oracle.conditional_mean(i, [&](const Observation& z) {
      const auto a = canonical_pair(g, z, quantile);
      const auto b = canonical_pair(g0, z, quantile);
      const double v = (a.eta - b.eta) * (a.zeta - b.zeta);
      return v * v;
    });
  }
  return std::sqrt(total);
}

NuisanceSet perturb(const NuisanceSet& g0, const std::map<std::string, Predictor>& delta, double t) {
  std::map<std::string, Predictor> comps;
  for (const auto& [name, base] : g0.components()) {
    auto it = delta.find(name);
    if (it == delta.end()) {
      comps.emplace(name, base);
      continue;
    }
    const Predictor d = it->second;
    const Predictor b = base;
    comps.emplace(name, Predictor(name + "+t*delta", [b, d, t](std::span<const double> x) { return b(x) + t * d(x); }));
  }
  return NuisanceSet(g0.effect(), std::move(comps));
}

double orthogonality_slope(const DiscreteOracle& oracle, const LossSpec& spec, std::span<const double> theta_values,
                           const NuisanceSet& g0, const std::function<NuisanceSet(double)>& path,
                           std::span<const double> t_grid) {
  const auto s0 = conditional_scores(oracle, theta_values, spec, g0);
  std::vector<double> lx, ly;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorCategory::invalid_argument, "path parameters must be positive");
    const auto st = conditional_scores(oracle, theta_values, spec, path(t));
    double dev = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) dev = std::max(dev, std::abs(st[i] - s0[i]));
    if (dev > 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(dev));
    }
  }
  if (lx.size() < 2) return kSlopeInfinite;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  return sxy / sxx;
}

double risk_delta(const Dataset& data, std::span<const double> calibrated, std::span<const double> base,
                  const NuisanceSet& g, const LossSpec& spec) {
  if (calibrated.size() != data.size() || base.size() != data.size()) {
    throw Error(ErrorCategory::invalid_argument, "prediction counts do not match the data");
  }
  if (data.empty()) throw Error(ErrorCategory::invalid_argument, "empty dataset");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const BoundLoss l = bind_loss(spec, g, data[i]);
    sum += l.value(calibrated[i]) - l.value(base[i]);
  }
  return sum / static_cast<double>(data.size());
}

BoundCheck theorem_bound_check(const DiscreteOracle& oracle, std::span<const double> theta_values,
                               const NuisanceSet& g, const NuisanceSet& g0, const LossSpec& spec) {
  BoundCheck c;
  c.lhs = exact_cal_error(oracle, theta_values, spec, g0);
  c.cross = cross_error(oracle, g, g0, spec.quantile);
  c.cal_under_g = exact_cal_error(oracle, theta_values, spec, g);
  c.rhs = c.cross + c.cal_under_g;
  c.holds = c.lhs <= c.rhs + 1e-10;
  return c;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCategory::invalid_argument, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxSummary box_summary(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCategory::invalid_argument, "box summary of an empty sample");
  std::sort(values.begin(), values.end());
  BoxSummary b;
  b.count = values.size();
  b.median = sorted_quantile(values, 0.5);
  b.q1 = sorted_quantile(values, 0.25);
  b.q3 = sorted_quantile(values, 0.75);
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const double reach = 1.5 * (b.q3 - b.q1);
  b.whisker_low = b.median;
  b.whisker_high = b.median;
  for (double v : values) {
    if (v >= b.median - reach) {
      b.whisker_low = v;
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= b.median + reach) {
      b.whisker_high = *it;
      break;
    }
  }
  return b;
}

MeanBand mean_band(std::span<const double> values) {
  MeanBand m;
  m.count = values.size();
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(ss / (n - 1.0));
  }
  const double half = 1.959963984540054 * m.sd / std::sqrt(n);
  m.lower = m.mean - half;
  m.upper = m.mean + half;
  return m;
}

}  // namespace causalcal
