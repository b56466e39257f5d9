#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "causalcal/data.hpp"
#include "causalcal/folds.hpp"
#include "causalcal/nuisance.hpp"

namespace causalcal {

struct PseudoSample {
  double base_pred = 0.0;
  double chi = 0.0;
  double weight = 1.0;
};

/// Sign applied to the correction term of the IV-style LATE pseudo-outcome.
/// `printed` is tau - (y~ - tau a~) Z~ / zeta; `flipped` adds the term instead.
enum class LateIvSign { printed, flipped };

std::string_view late_iv_sign_name(LateIvSign sign);
LateIvSign parse_late_iv_sign(std::string_view name);

struct PseudoOptions {
  LateIvSign late_iv_sign = LateIvSign::printed;
  /// Symmetric clip |chi| <= magnitude; off by default.
  std::optional<double> clip_magnitude;
};

/// mu(1,x) - mu(0,x) + (a/pi(x) - (1-a)/(1-pi(x))) (y - mu(a,x))
double chi_cate(const NuisanceSet& g, const Observation& z);

/// d/da mu(a,x) + score(a,x) (y - mu(a,x))
double chi_acd(const NuisanceSet& g, const Observation& z);

/// p/q + a(d - pi0)/q * (p/q - y(d - pi0)/(a(d - pi0))), evaluated in the
/// simplified form p/q + a(d - pi0) p / q^2 - y(d - pi0)/q, which is defined
/// at a = 0 and agrees with the ratio form wherever that is defined.
double chi_late(const NuisanceSet& g, const Observation& z);

/// tau -/+ (y~ - tau a~) Z~ / zeta with tau = (mu(1,x) - mu(0,x)) / zeta,
/// y~ = y - mu(a,x), a~ = a - pi(x), Z~ = d - zeta(x).
double chi_late_iv(const NuisanceSet& g, const Observation& z, LateIvSign sign = LateIvSign::printed);

/// The "naive plug-in" pseudo-outcome mu(1,x) - mu(0,x) (not orthogonal).
double chi_cate_plugin(const NuisanceSet& g, const Observation& z);

/// Dispatches on g.effect(); QUT has no pseudo-outcome (invalid-argument).
double chi(const NuisanceSet& g, const Observation& z, const PseudoOptions& options = {});

struct PseudoBatch {
  std::vector<PseudoSample> samples;
  std::size_t clipped = 0;
  std::optional<double> clip_magnitude;
};

/// Out-of-fold pseudo-outcomes: row i uses the NuisanceSet of fold_of[i].
/// Requires k >= 2 and one FoldNuisance per fold.
PseudoBatch make_pseudo_dataset(const Dataset& data, std::span<const double> base_preds,
                                const std::vector<FoldNuisance>& nuisances,
                                const FoldAssignment& folds, const PseudoOptions& options = {});

/// All rows transformed with a single NuisanceSet (sample-splitting variant).
PseudoBatch make_pseudo_dataset(const Dataset& data, std::span<const double> base_preds,
                                const NuisanceSet& nuisances, const PseudoOptions& options = {});

}  // namespace causalcal
