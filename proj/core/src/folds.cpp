#include "causalcal/folds.hpp"

#include <numeric>
#include <string>

#include "causalcal/error.hpp"

namespace causalcal {

namespace {

std::vector<std::size_t> permutation(std::size_t n, const SeedStream& seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = seed.generator();
  rng.shuffle(idx);
  return idx;
}

}  // namespace

std::vector<std::size_t> FoldAssignment::indices_in(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::indices_out(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::sizes() const {
  std::vector<std::size_t> s(k, 0);
  for (std::size_t f : fold_of) ++s[f];
  return s;
}

FoldAssignment split_folds(std::size_t n, std::size_t k, const SeedStream& seed) {
  if (k == 0 || k > n) {
    throw Error(ErrorCategory::invalid_argument,
                "fold count " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
  }
  const auto perm = permutation(n, seed);
  FoldAssignment out{n, k, std::vector<std::size_t>(n)};
  for (std::size_t pos = 0; pos < n; ++pos) out.fold_of[perm[pos]] = pos % k;
  return out;
}

HalfSplit split_halves(std::size_t n, const SeedStream& seed) {
  const auto perm = permutation(n, seed);
  const std::size_t first = (n + 1) / 2;
  HalfSplit out;
  out.first.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(first));
  out.second.assign(perm.begin() + static_cast<std::ptrdiff_t>(first), perm.end());
  return out;
}

std::vector<std::vector<std::size_t>> split_parts(std::size_t n, std::size_t parts,
                                                  const SeedStream& seed) {
  if (parts == 0 || parts > n) {
    throw Error(ErrorCategory::invalid_argument, "part count must be in [1, n]");
  }
  const auto perm = permutation(n, seed);
  std::vector<std::vector<std::size_t>> out(parts);
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t size = n / parts + (p < n % parts ? 1 : 0);
    out[p].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                  perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return out;
}

}  // namespace causalcal
