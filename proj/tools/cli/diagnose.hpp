#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace causalcal::cli {

/// Orthogonality slopes of the CATE loss and the plug-in loss on the
/// standard finite CATE model.
nlohmann::ordered_json diagnose_orthogonality(std::uint64_t seed);

/// The bound Cal(theta, g0) <= cross error + Cal(theta, g) on
/// randomized finite models.
nlohmann::ordered_json diagnose_theorem1(std::uint64_t seed, std::size_t draws = 20);

/// Measured strong-convexity and smoothness constants of two losses.
nlohmann::ordered_json diagnose_convexity(std::uint64_t seed);

struct UmbMassStudy {
  std::size_t runs = 0;
  std::size_t bins = 0;
  std::size_t runs_in_range = 0;
  double min_mass = 1.0;
  double max_mass = 0.0;
  std::vector<std::vector<double>> masses;
};

/// Three-way UMB on the synthetic CATE model with true nuisances; bucket
/// masses are measured on a fresh sample of `per_third` rows per run and
/// checked against [1/(2B), 2/B].
UmbMassStudy umb_mass_study(std::uint64_t seed, std::size_t runs, std::size_t per_third, std::size_t bins);
nlohmann::ordered_json diagnose_umb_mass(std::uint64_t seed, std::size_t runs = 20, std::size_t per_third = 2000,
                                         std::size_t bins = 10);

}  // namespace causalcal::cli
