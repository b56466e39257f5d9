#include "causalcal/calibrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "causalcal/error.hpp"

namespace causalcal {

std::string_view calibrator_class_name(CalibratorClass cls) {
  switch (cls) {
    case CalibratorClass::isotonic: return "isotonic";
    case CalibratorClass::binning: return "binning";
    case CalibratorClass::linear: return "linear";
    case CalibratorClass::platt: return "platt";
  }
  return "unknown";
}

CalibratorClass parse_calibrator_class(std::string_view name) {
  for (auto c : {CalibratorClass::isotonic, CalibratorClass::binning, CalibratorClass::linear,
                 CalibratorClass::platt}) {
    if (calibrator_class_name(c) == name) return c;
  }
  throw Error(ErrorCategory::config_error, "unknown calibrator '" + std::string(name) + "'");
}

bool ModelMeta::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void ModelMeta::add_flag(std::string flag) {
  if (!has_flag(flag)) flags.push_back(std::move(flag));
}

CalibratorModel::CalibratorModel(Params params, ModelMeta meta)
    : params_(std::move(params)), meta_(std::move(meta)) {}

CalibratorClass CalibratorModel::cls() const noexcept {
  switch (params_.index()) {
    case 0: return CalibratorClass::isotonic;
    case 1: return CalibratorClass::binning;
    case 2: return CalibratorClass::linear;
    default: return CalibratorClass::platt;
  }
}

std::size_t bucket_of(std::span<const double> edges, double pred) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), pred) - edges.begin());
}

double CalibratorModel::apply(double pred) const {
  if (const auto* iso = std::get_if<IsotonicParams>(&params_)) {
    const auto& bp = iso->breakpoints;
    auto it = std::upper_bound(bp.begin(), bp.end(), pred);
    const std::size_t k = it == bp.begin() ? 0 : static_cast<std::size_t>(it - bp.begin()) - 1;
    return iso->levels[k] + iso->strict_slope * pred;
  }
  if (const auto* bin = std::get_if<BinningParams>(&params_)) {
    return bin->levels[bucket_of(bin->edges, pred)];
  }
  if (const auto* lin = std::get_if<LinearParams>(&params_)) {
    return lin->slope * pred + lin->intercept;
  }
  const auto& pl = std::get<PlattParams>(params_);
  return 1.0 / (1.0 + std::exp(pl.a * pred + pl.b));
}

std::vector<double> CalibratorModel::apply(std::span<const double> preds) const {
  std::vector<double> out(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) out[i] = apply(preds[i]);
  return out;
}

bool CalibratorModel::below_training_range(double pred) const {
  const auto* iso = std::get_if<IsotonicParams>(&params_);
  return iso && !iso->breakpoints.empty() && pred < iso->breakpoints.front();
}

namespace {

void check_points(std::span<const WeightedPoint> points) {
  if (points.empty()) throw Error(ErrorCategory::invalid_argument, "no points to calibrate on");
  for (const auto& p : points) {
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
      throw Error(ErrorCategory::invalid_argument, "calibration weights must be positive");
    }
    if (!std::isfinite(p.pred) || !std::isfinite(p.target)) {
      throw Error(ErrorCategory::invalid_argument, "non-finite calibration point");
    }
  }
}

/// Sorted by pred with equal preds merged into one weighted point.
std::vector<WeightedPoint> pool_ties(std::vector<WeightedPoint> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const WeightedPoint& a, const WeightedPoint& b) { return a.pred < b.pred; });
  std::vector<WeightedPoint> out;
  for (const auto& p : points) {
    if (!out.empty() && out.back().pred == p.pred) {
      auto& q = out.back();
      const double w = q.weight + p.weight;
      q.target = (q.target * q.weight + p.target * p.weight) / w;
      q.weight = w;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<WeightedPoint> to_points(std::span<const PseudoSample> pseudo) {
  std::vector<WeightedPoint> pts;
  pts.reserve(pseudo.size());
  for (const auto& s : pseudo) pts.push_back({s.base_pred, s.chi, s.weight});
  return pts;
}

}  // namespace

CalibratorModel pava(std::vector<WeightedPoint> points) {
  check_points(points);
  const auto pooled = pool_ties(std::move(points));
  struct Block {
    double start;
    double sum_w;
    double mean;
  };
  std::vector<Block> stack;
  for (const auto& p : pooled) {
    Block b{p.pred, p.weight, p.target};
    while (!stack.empty() && stack.back().mean >= b.mean) {
      const Block& prev = stack.back();
      const double w = prev.sum_w + b.sum_w;
      b = Block{prev.start, w, (prev.mean * prev.sum_w + b.mean * b.sum_w) / w};
      stack.pop_back();
    }
    stack.push_back(b);
  }
  IsotonicParams params;
  for (const auto& b : stack) {
    params.breakpoints.push_back(b.start);
    params.levels.push_back(b.mean);
  }
  return CalibratorModel(std::move(params));
}

CalibratorModel make_strict(const CalibratorModel& model, double strict_slope) {
  if (!(strict_slope > 0.0)) throw Error(ErrorCategory::invalid_argument, "strict slope must be positive");
  if (model.cls() != CalibratorClass::isotonic) {
    throw Error(ErrorCategory::invalid_argument, "make_strict applies to isotonic models");
  }
  IsotonicParams p = model.as<IsotonicParams>();
  p.strict_slope = strict_slope;
  ModelMeta meta = model.meta();
  meta.add_flag("strict");
  return CalibratorModel(std::move(p), std::move(meta));
}

UmbEdges umb_edges(std::span<const double> preds, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCategory::invalid_argument, "bin count must be positive");
  if (preds.size() < bins) {
    throw Error(ErrorCategory::invalid_argument, "need at least as many predictions as bins");
  }
  std::vector<double> sorted(preds.begin(), preds.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  UmbEdges out;
  out.requested_bins = bins;
  for (std::size_t b = 1; b < bins; ++b) {
    const double e = sorted[b * n / bins];
    if (e == sorted.front() || (!out.edges.empty() && out.edges.back() == e)) {
      ++out.merged;
      continue;
    }
    out.edges.push_back(e);
  }
  return out;
}

CalibratorModel binning_fit_with_edges(std::span<const PseudoSample> pseudo, std::span<const double> edges) {
  if (pseudo.empty()) throw Error(ErrorCategory::invalid_argument, "no points to calibrate on");
  const std::size_t B = edges.size() + 1;
  std::vector<double> sw(B, 0.0), sy(B, 0.0);
  for (const auto& s : pseudo) {
    const std::size_t b = bucket_of(edges, s.base_pred);
    sw[b] += s.weight;
    sy[b] += s.weight * s.chi;
  }
  BinningParams params;
  params.edges.assign(edges.begin(), edges.end());
  params.levels.assign(B, 0.0);
  std::vector<char> filled(B, 0);
  for (std::size_t b = 0; b < B; ++b) {
    if (sw[b] > 0.0) {
      params.levels[b] = sy[b] / sw[b];
      filled[b] = 1;
    }
  }
  ModelMeta meta;
  bool inherited = false;
  for (std::size_t b = 0; b < B; ++b) {
    if (filled[b]) continue;
    inherited = true;
    std::size_t best = B;
    for (std::size_t dist = 1; dist < B && best == B; ++dist) {
      if (b >= dist && filled[b - dist]) best = b - dist;
      else if (b + dist < B && filled[b + dist]) best = b + dist;
    }
    if (best == B) throw Error(ErrorCategory::invalid_argument, "every bucket is empty");
    params.levels[b] = params.levels[best];
  }
  if (inherited) meta.add_flag("empty_bucket_inherited");
  return CalibratorModel(std::move(params), std::move(meta));
}

CalibratorModel binning_fit(std::span<const PseudoSample> pseudo, std::size_t bins) {
  std::vector<double> preds;
  preds.reserve(pseudo.size());
  for (const auto& s : pseudo) preds.push_back(s.base_pred);
  const UmbEdges e = umb_edges(preds, bins);
  CalibratorModel m = binning_fit_with_edges(pseudo, e.edges);
  m.meta().merged_buckets = e.merged;
  if (e.merged > 0) m.meta().add_flag("merged_buckets");
  return m;
}

CalibratorModel linear_fit(std::span<const PseudoSample> pseudo) {
  if (pseudo.size() < 2) throw Error(ErrorCategory::degenerate_fit, "linear calibration needs 2 points");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& s : pseudo) {
    sw += s.weight;
    sx += s.weight * s.base_pred;
    sy += s.weight * s.chi;
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : pseudo) {
    const double dx = s.base_pred - mx;
    sxx += s.weight * dx * dx;
    sxy += s.weight * dx * (s.chi - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCategory::degenerate_fit, "predictions have zero variance");
  const double slope = sxy / sxx;
  return CalibratorModel(LinearParams{slope, my - slope * mx});
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double platt_objective(std::span<const PseudoSample> pseudo, double a, double b) {
  double f = 0.5 * kPlattRegularization * (a * a + b * b);
  for (const auto& s : pseudo) {
    const double z = a * s.base_pred + b;
    f += s.weight * (s.chi * softplus(z) + (1.0 - s.chi) * softplus(-z));
  }
  return f;
}

CalibratorModel platt_fit(std::span<const PseudoSample> pseudo) {
  if (pseudo.empty()) throw Error(ErrorCategory::invalid_argument, "no points to calibrate on");
  double sw = 0.0, st = 0.0;
  for (const auto& s : pseudo) {
    if (!(s.chi >= 0.0 && s.chi <= 1.0)) {
      throw Error(ErrorCategory::invalid_argument, "Platt scaling needs targets in [0, 1]");
    }
    sw += s.weight;
    st += s.weight * s.chi;
  }
  const double m = std::clamp(st / sw, 1e-6, 1.0 - 1e-6);
  double a = 0.0, b = std::log((1.0 - m) / m);
  double f = platt_objective(pseudo, a, b);
  ModelMeta meta;
  bool converged = false;
  const double lam = kPlattRegularization;
  for (int iter = 0; iter < 200; ++iter) {
    double ga = lam * a, gb = lam * b, haa = lam, hab = 0.0, hbb = lam;
    for (const auto& s : pseudo) {
      const double z = a * s.base_pred + b;
      const double tau = 1.0 / (1.0 + std::exp(z));
      const double r = s.weight * (s.chi - tau);
      const double h = s.weight * tau * (1.0 - tau);
      ga += r * s.base_pred;
      gb += r;
      haa += h * s.base_pred * s.base_pred;
      hab += h * s.base_pred;
      hbb += h;
    }
    if (std::hypot(ga, gb) < 1e-8) {
      converged = true;
      break;
    }
    const double det = haa * hbb - hab * hab;
    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;
    if (!std::isfinite(da) || !std::isfinite(db)) {
      da = -ga;
      db = -gb;
    }
    const double slope = ga * da + gb * db;
    double step = 1.0;
    double fn = platt_objective(pseudo, a + da, b + db);
    while (fn > f + 1e-4 * step * slope && step > 1e-12) {
      step *= 0.5;
      fn = platt_objective(pseudo, a + step * da, b + step * db);
    }
    if (step <= 1e-12) {
      // No further decrease is representable; accept the current point.
      converged = std::hypot(ga, gb) < 1e-6;
      break;
    }
    a += step * da;
    b += step * db;
    f = fn;
  }
  if (!converged) meta.add_flag("max_iterations");

  // Binary targets that are perfectly ordered by pred have no finite unregularized fit.
  bool binary = true;
  double max0 = -std::numeric_limits<double>::infinity(), min0 = std::numeric_limits<double>::infinity();
  double max1 = max0, min1 = min0;
  for (const auto& s : pseudo) {
    if (s.chi == 0.0) {
      max0 = std::max(max0, s.base_pred);
      min0 = std::min(min0, s.base_pred);
    } else if (s.chi == 1.0) {
      max1 = std::max(max1, s.base_pred);
      min1 = std::min(min1, s.base_pred);
    } else {
      binary = false;
    }
  }
  if (binary && std::isfinite(max0) && std::isfinite(max1) && (max0 < min1 || max1 < min0)) {
    meta.add_flag("separable");
  }
  return CalibratorModel(PlattParams{a, b}, std::move(meta));
}

namespace {

/// Extended minimizer of b -> sum_i l_i(o_i + b): status -1 when the sum
/// decreases without bound as b -> -inf, +1 as b -> +inf.
struct ExtendedMin {
  double argmin = 0.0;
  int status = 0;
};

ExtendedMin solve_shifted(std::span<const BoundLoss> losses, std::span<const double> offsets) {
  double S = 0.0, C0 = 0.0, mag = 0.0;
  std::vector<std::pair<double, double>> kinks;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const auto& l = losses[i];
    const double o = offsets.empty() ? 0.0 : offsets[i];
    const double w = l.weight();
    if (l.family() == LossFamily::squared) {
      S += w;
      C0 += w * (o - l.target());
      mag += std::abs(w * (o - l.target()));
    } else {
      C0 += w * (-l.scale() * l.quantile() - l.correction());
      mag += std::abs(w * l.scale()) + std::abs(w * l.correction());
      if (w * l.scale() > 0.0) kinks.emplace_back(l.target() - o, w * l.scale());
    }
  }
  const double tol = 1e-12 * std::max(mag, 1e-300);
  std::sort(kinks.begin(), kinks.end());
  if (S > 0.0) {
    double c = C0;
    for (const auto& [k, jump] : kinks) {
      const double root = -c / S;
      if (root < k) return {root, 0};
      c += jump;
      if (S * k + c >= -tol) return {k, 0};
    }
    return {-c / S, 0};
  }
  if (C0 > tol) return {-std::numeric_limits<double>::infinity(), -1};
  if (C0 >= -tol) return {kinks.empty() ? 0.0 : kinks.front().first, 0};
  double c = C0;
  for (const auto& [k, jump] : kinks) {
    c += jump;
    if (c >= -tol) return {k, 0};
  }
  return {std::numeric_limits<double>::infinity(), 1};
}

double total_value(std::span<const BoundLoss> losses, std::span<const double> offsets, double b) {
  double v = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    v += losses[i].value((offsets.empty() ? 0.0 : offsets[i]) + b);
  }
  return v;
}

[[noreturn]] void unbounded(int status) {
  throw Error(ErrorCategory::unbounded_objective,
              std::string("loss sum decreases without bound as the level goes to ") +
                  (status < 0 ? "-inf" : "+inf"));
}

}  // namespace

ShiftedMinimum minimize_shifted(std::span<const BoundLoss> losses, std::span<const double> offsets) {
  if (losses.empty()) throw Error(ErrorCategory::invalid_argument, "no losses to minimize");
  if (!offsets.empty() && offsets.size() != losses.size()) {
    throw Error(ErrorCategory::invalid_argument, "offset count does not match loss count");
  }
  const ExtendedMin m = solve_shifted(losses, offsets);
  if (m.status != 0) unbounded(m.status);
  return {m.argmin, total_value(losses, offsets, m.argmin)};
}

double bucket_minimize(std::span<const BoundLoss> losses) { return minimize_shifted(losses, {}).argmin; }

namespace {

LossFamily common_family(std::span<const LossPoint> points) {
  if (points.empty()) throw Error(ErrorCategory::invalid_argument, "no losses to calibrate on");
  const LossFamily fam = points.front().loss.family();
  for (const auto& p : points) {
    if (p.loss.family() != fam) throw Error(ErrorCategory::invalid_argument, "mixed loss families");
    if (!std::isfinite(p.pred)) throw Error(ErrorCategory::invalid_argument, "non-finite prediction");
  }
  return fam;
}

CalibratorModel pinball_binning(std::span<const LossPoint> points, std::size_t bins) {
  std::vector<double> preds;
  preds.reserve(points.size());
  for (const auto& p : points) preds.push_back(p.pred);
  const UmbEdges e = umb_edges(preds, bins);
  const std::size_t B = e.bins();
  std::vector<std::vector<BoundLoss>> groups(B);
  for (const auto& p : points) groups[bucket_of(e.edges, p.pred)].push_back(p.loss);
  BinningParams params;
  params.edges = e.edges;
  params.levels.assign(B, 0.0);
  std::vector<char> filled(B, 0);
  for (std::size_t b = 0; b < B; ++b) {
    if (groups[b].empty()) continue;
    try {
      params.levels[b] = bucket_minimize(groups[b]);
    } catch (const Error& err) {
      throw err.with_context("bucket " + std::to_string(b));
    }
    filled[b] = 1;
  }
  ModelMeta meta;
  meta.merged_buckets = e.merged;
  if (e.merged > 0) meta.add_flag("merged_buckets");
  for (std::size_t b = 0; b < B; ++b) {
    if (filled[b]) continue;
    for (std::size_t d = 1; d < B; ++d) {
      if (b >= d && filled[b - d]) { params.levels[b] = params.levels[b - d]; break; }
      if (b + d < B && filled[b + d]) { params.levels[b] = params.levels[b + d]; break; }
    }
    meta.add_flag("empty_bucket_inherited");
  }
  return CalibratorModel(std::move(params), std::move(meta));
}

CalibratorModel pinball_linear(std::span<const LossPoint> points) {
  std::vector<BoundLoss> losses;
  std::vector<double> x;
  losses.reserve(points.size());
  x.reserve(points.size());
  for (const auto& p : points) {
    losses.push_back(p.loss);
    x.push_back(p.pred);
  }
  std::vector<double> offsets(x.size());
  auto h = [&](double alpha) {
    for (std::size_t i = 0; i < x.size(); ++i) offsets[i] = alpha * x[i];
    const ExtendedMin m = solve_shifted(losses, offsets);
    if (m.status != 0) unbounded(m.status);
    return total_value(losses, offsets, m.argmin);
  };

  // h is convex: bracket its minimizer by expanding from [0, 2] around 1.
  double lo = 0.0, mid = 1.0, hi = 2.0;
  double flo = h(lo), fmid = h(mid), fhi = h(hi);
  int expansions = 0;
  while (!(fmid <= flo && fmid <= fhi)) {
    if (++expansions > 60) {
      throw Error(ErrorCategory::unbounded_objective, "linear calibration objective has no minimizer");
    }
    const double width = hi - lo;
    if (flo < fmid) {
      hi = mid; fhi = fmid;
      mid = lo; fmid = flo;
      lo = mid - width;
      flo = h(lo);
    } else {
      lo = mid; flo = fmid;
      mid = hi; fmid = fhi;
      hi = mid + width;
      fhi = h(hi);
    }
  }
  // Golden-section search on [lo, hi].
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = h(c), fd = h(d);
  for (int it = 0; it < 200 && (b - a) > 1e-11 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a);
      fc = h(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a);
      fd = h(d);
    }
  }
  // Best of the evaluated candidates (the bracket midpoint included).
  double alpha = fc <= fd ? c : d;
  if (fmid < std::min(fc, fd)) alpha = mid;
  for (std::size_t i = 0; i < x.size(); ++i) offsets[i] = alpha * x[i];
  const ExtendedMin m = solve_shifted(losses, offsets);
  return CalibratorModel(LinearParams{alpha, m.argmin});
}

/// Pool-adjacent-violators with a general block solver. Blocks whose loss
/// sum is unbounded carry an infinite level; they either merge away or make
/// the isotonic problem itself unbounded.
CalibratorModel pinball_isotonic(std::span<const LossPoint> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a].pred < points[b].pred; });
  struct Block {
    double start;
    std::vector<BoundLoss> losses;
    double level;
  };
  auto level_of = [](const std::vector<BoundLoss>& ls) {
    const ExtendedMin m = solve_shifted(ls, {});
    return m.argmin;
  };
  std::vector<Block> stack;
  std::size_t i = 0;
  while (i < order.size()) {
    Block b{points[order[i]].pred, {}, 0.0};
    std::size_t j = i;
    while (j < order.size() && points[order[j]].pred == b.start) b.losses.push_back(points[order[j++]].loss);
    i = j;
    b.level = level_of(b.losses);
    while (!stack.empty() && stack.back().level >= b.level) {
      Block prev = std::move(stack.back());
      stack.pop_back();
      prev.losses.insert(prev.losses.end(), b.losses.begin(), b.losses.end());
      prev.level = level_of(prev.losses);
      b = std::move(prev);
    }
    stack.push_back(std::move(b));
  }
  IsotonicParams params;
  for (const auto& b : stack) {
    if (!std::isfinite(b.level)) unbounded(b.level < 0 ? -1 : 1);
    params.breakpoints.push_back(b.start);
    params.levels.push_back(b.level);
  }
  return CalibratorModel(std::move(params));
}

}  // namespace

CalibratorModel erm_calibrate(std::span<const LossPoint> points, const ErmClass& cls) {
  const LossFamily fam = common_family(points);
  if (cls.cls == CalibratorClass::platt) {
    throw Error(ErrorCategory::invalid_argument, "ERM calibration does not support the Platt class");
  }
  if (fam == LossFamily::squared) {
    std::vector<PseudoSample> pseudo;
    pseudo.reserve(points.size());
    for (const auto& p : points) pseudo.push_back({p.pred, p.loss.target(), p.loss.weight()});
    switch (cls.cls) {
      case CalibratorClass::binning: return binning_fit(pseudo, cls.bins);
      case CalibratorClass::linear: return linear_fit(pseudo);
      case CalibratorClass::isotonic: return pava(to_points(pseudo));
      case CalibratorClass::platt: break;
    }
  } else {
    switch (cls.cls) {
      case CalibratorClass::binning: return pinball_binning(points, cls.bins);
      case CalibratorClass::linear: return pinball_linear(points);
      case CalibratorClass::isotonic: return pinball_isotonic(points);
      case CalibratorClass::platt: break;
    }
  }
  throw Error(ErrorCategory::invalid_argument, "unsupported loss and calibrator combination");
}

double erm_objective(std::span<const LossPoint> points, const CalibratorModel& model) {
  double v = 0.0;
  for (const auto& p : points) v += p.loss.value(model.apply(p.pred));
  return v;
}

std::vector<double> ensure_distinct_levels(std::vector<double> levels, double noise, const SeedStream& seed) {
  if (noise < 0.0) throw Error(ErrorCategory::invalid_argument, "noise must be nonnegative");
  if (noise == 0.0 || levels.size() < 2) return levels;
  auto distinct = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (distinct(levels)) return levels;
  Rng rng = seed.generator();
  const std::vector<double> original = levels;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    auto clashes = [&] {
      for (std::size_t j = 0; j < i; ++j) {
        if (levels[j] == levels[i]) return true;
      }
      return false;
    };
    for (int attempt = 0; clashes(); ++attempt) {
      if (attempt > 1000) throw Error(ErrorCategory::invalid_state, "could not separate levels");
      levels[i] = original[i] + rng.uniform(-noise, noise);
    }
  }
  return levels;
}

}  // namespace causalcal
