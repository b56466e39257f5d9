#include "causalcal/pseudo.hpp"

#include <cmath>
#include <string>

#include "causalcal/error.hpp"

namespace causalcal {

std::string_view late_iv_sign_name(LateIvSign sign) {
  return sign == LateIvSign::printed ? "printed" : "flipped";
}

LateIvSign parse_late_iv_sign(std::string_view name) {
  if (name == "printed") return LateIvSign::printed;
  if (name == "flipped") return LateIvSign::flipped;
  throw Error(ErrorCategory::config_error, "late_iv_sign must be 'printed' or 'flipped'");
}

namespace {

double instrument_of(const Observation& z) {
  if (!z.d) throw Error(ErrorCategory::data_error, "observation has no instrument value");
  return *z.d;
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw Error(ErrorCategory::invalid_nuisance,
                std::string(name) + " = " + std::to_string(v) + " lies outside (0, 1)");
  }
}

}  // namespace

double chi_cate(const NuisanceSet& g, const Observation& z) {
  const double pi = g.at("pi")(z.x);
  require_open_unit(pi, "pi");
  const double m0 = g.at("mu0")(z.x);
  const double m1 = g.at("mu1")(z.x);
  const double ma = z.a == 1.0 ? m1 : m0;
  return m1 - m0 + (z.a / pi - (1.0 - z.a) / (1.0 - pi)) * (z.y - ma);
}

double chi_acd(const NuisanceSet& g, const Observation& z) {
  const auto ax = with_treatment(z.a, z.x);
  const double score = g.at("score")(ax);
  if (!std::isfinite(score)) throw Error(ErrorCategory::invalid_nuisance, "non-finite treatment score");
  return g.at("dmu")(ax) + score * (z.y - g.at("mu")(ax));
}

double chi_late(const NuisanceSet& g, const Observation& z) {
  const double d = instrument_of(z);
  const double p = g.at("p")(z.x);
  const double q = g.at("q")(z.x);
  const double pi0 = g.at("pi0")(z.x);
  if (q == 0.0) throw Error(ErrorCategory::division_by_zero, "q(x) = 0");
  const double r = d - pi0;
  return p / q + z.a * r * p / (q * q) - z.y * r / q;
}

double chi_late_iv(const NuisanceSet& g, const Observation& z, LateIvSign sign) {
  const double d = instrument_of(z);
  const double zeta = g.at("zeta_inst")(z.x);
  require_open_unit(zeta, "zeta_inst");
  const double m0 = g.at("mu0")(z.x);
  const double m1 = g.at("mu1")(z.x);
  const double pi = g.at("pi")(z.x);
  const double tau = (m1 - m0) / zeta;
  const double y_res = z.y - (z.a == 1.0 ? m1 : m0);
  const double a_res = z.a - pi;
  const double z_res = d - zeta;
  const double corr = (y_res - tau * a_res) * z_res / zeta;
  return sign == LateIvSign::printed ? tau - corr : tau + corr;
}

double chi_cate_plugin(const NuisanceSet& g, const Observation& z) {
  return g.at("mu1")(z.x) - g.at("mu0")(z.x);
}

double chi(const NuisanceSet& g, const Observation& z, const PseudoOptions& options) {
  double v = 0.0;
  switch (g.effect()) {
    case Effect::cate: v = chi_cate(g, z); break;
    case Effect::acd: v = chi_acd(g, z); break;
    case Effect::late_known_pi: v = chi_late(g, z); break;
    case Effect::late_iv: v = chi_late_iv(g, z, options.late_iv_sign); break;
    case Effect::qut:
      throw Error(ErrorCategory::invalid_argument, "the QUT loss has no pseudo-outcome");
  }
  if (!std::isfinite(v)) throw Error(ErrorCategory::invalid_nuisance, "non-finite pseudo-outcome");
  return v;
}

namespace {

PseudoSample transform(const NuisanceSet& g, const Observation& z, double base,
                       const PseudoOptions& options, std::size_t row, std::size_t& clipped) {
  double v = 0.0;
  try {
    v = chi(g, z, options);
  } catch (const Error& e) {
    throw e.with_context("row " + std::to_string(row));
  }
  if (options.clip_magnitude) {
    const double m = *options.clip_magnitude;
    if (std::abs(v) > m) {
      v = v > 0 ? m : -m;
      ++clipped;
    }
  }
  return PseudoSample{base, v, 1.0};
}

}  // namespace

PseudoBatch make_pseudo_dataset(const Dataset& data, std::span<const double> base_preds,
                                const std::vector<FoldNuisance>& nuisances, const FoldAssignment& folds,
                                const PseudoOptions& options) {
  if (folds.k < 2) throw Error(ErrorCategory::invalid_argument, "cross-fitting needs at least 2 folds");
  if (folds.n != data.size() || base_preds.size() != data.size()) {
    throw Error(ErrorCategory::invalid_argument, "data, predictions and folds disagree in size");
  }
  std::vector<const NuisanceSet*> by_fold(folds.k, nullptr);
  for (const auto& fn : nuisances) {
    if (fn.fold < folds.k) by_fold[fn.fold] = &fn.nuisances;
  }
  PseudoBatch out;
  out.clip_magnitude = options.clip_magnitude;
  out.samples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const NuisanceSet* g = by_fold[folds.fold_of[i]];
    if (!g) {
      throw Error(ErrorCategory::invalid_state,
                  "no nuisance model for fold " + std::to_string(folds.fold_of[i]));
    }
    out.samples.push_back(transform(*g, data[i], base_preds[i], options, i, out.clipped));
  }
  return out;
}

PseudoBatch make_pseudo_dataset(const Dataset& data, std::span<const double> base_preds,
                                const NuisanceSet& nuisances, const PseudoOptions& options) {
  if (base_preds.size() != data.size()) {
    throw Error(ErrorCategory::invalid_argument, "base predictions do not match the data");
  }
  PseudoBatch out;
  out.clip_magnitude = options.clip_magnitude;
  out.samples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.samples.push_back(transform(nuisances, data[i], base_preds[i], options, i, out.clipped));
  }
  return out;
}

}  // namespace causalcal
