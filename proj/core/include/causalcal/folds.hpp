#pragma once

#include <cstddef>
#include <vector>

#include "causalcal/rng.hpp"

namespace causalcal {

struct FoldAssignment {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> indices_in(std::size_t fold) const;
  std::vector<std::size_t> indices_out(std::size_t fold) const;
  std::vector<std::size_t> sizes() const;
};

/// Uniformly random partition of [0, n) into k folds of size floor(n/k) or
/// ceil(n/k). A shuffled permutation is dealt round-robin, so the first
/// n mod k folds get the extra element.
FoldAssignment split_folds(std::size_t n, std::size_t k, const SeedStream& seed);

/// Shuffled two-way split with the larger part first: sizes ceil(n/2), floor(n/2).
struct HalfSplit {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};
HalfSplit split_halves(std::size_t n, const SeedStream& seed);

/// Shuffled split into `parts` consecutive chunks of the permutation with
/// sizes as in split_folds.
std::vector<std::vector<std::size_t>> split_parts(std::size_t n, std::size_t parts,
                                                  const SeedStream& seed);

}  // namespace causalcal
