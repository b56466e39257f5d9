#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace causalcal {

/// SplitMix64 step. Advances `state` by 0x9E3779B97F4A7C15 and returns
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31);
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** generator.
///
/// State transition (s[0..3] 64-bit words):
///   result = rotl(s[1] * 5, 7) * 9
///   t = s[1] << 17
///   s[2] ^= s[0]; s[3] ^= s[1]; s[1] ^= s[2]; s[0] ^= s[3]
///   s[2] ^= t; s[3] = rotl(s[3], 45)
///
/// Derived variates are defined here rather than through <random> so that
/// streams are bit-identical across standard libraries:
///   uniform()      = (next() >> 11) * 2^-53                 in [0, 1)
///   uniform_open() = ((next() >> 11) + 1) * 2^-53           in (0, 1]
///   normal()       = sqrt(-2 ln u1) * cos(2 pi u2), u1 = uniform_open(), u2 = uniform()
///   below(n)       = rejection sampling on next() against 2^64 mod n
class Rng {
 public:
  explicit Rng(std::uint64_t seed_key);

  std::uint64_t next();
  double uniform();
  double uniform_open();
  double uniform(double lo, double hi);
  double normal();
  bool bernoulli(double p);
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates from the back, using below().
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

/// A named, reproducible random stream.
///
/// The generator key for (master_seed, stream_id) is
///   key = master_seed + 0x9E3779B97F4A7C15 * (stream_id + 1)   (mod 2^64)
/// and the four xoshiro words are four successive splitmix64(key) outputs.
/// For a fixed master seed the key is injective in stream_id.
struct SeedStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  Rng generator() const;

  /// A nested stream: master = splitmix64 of this stream's key, id = `id`.
  SeedStream child(std::uint64_t id) const;

  friend bool operator==(const SeedStream&, const SeedStream&) = default;
};

SeedStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace causalcal
