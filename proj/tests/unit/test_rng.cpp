#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "causalcal/rng.hpp"

using namespace causalcal;

TEST_SUITE("rng") {
  TEST_CASE("splitmix64 reference output") {
    std::uint64_t st = 0;
    CHECK(splitmix64(st) == 0xe220a8397b1dcdafULL);
    CHECK(st == 0x9E3779B97F4A7C15ULL);
  }

  TEST_CASE("xoshiro stream from a fixed key") {
    Rng g(0);
    CHECK(g.next() == 0x99ec5f36cb75f2b4ULL);
    CHECK(g.next() == 0xbf6e1f784956452aULL);
    CHECK(g.next() == 0x1a5f849d4933e6e0ULL);
  }

  TEST_CASE("derived and child streams") {
    CHECK(derive_stream(42, 7).generator().next() == 0x74ea6fa5b404cb63ULL);
    CHECK(derive_stream(42, 7).child(3).generator().next() == 0xaea8ea9a6e715b6bULL);
    CHECK(derive_stream(42, 7).generator().uniform() == doctest::Approx(0.4567022113369773).epsilon(1e-15));
    CHECK(derive_stream(42, 7).child(3) == derive_stream(42, 7).child(3));
    CHECK_FALSE(derive_stream(42, 7) == derive_stream(42, 8));
  }

  TEST_CASE("distinct stream ids give distinct streams") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t id = 0; id < 1000; ++id) firsts.insert(derive_stream(5, id).generator().next());
    CHECK(firsts.size() == 1000);
  }

  TEST_CASE("variates stay in range") {
    Rng g(11);
    for (int i = 0; i < 10000; ++i) {
      const double u = g.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      const double v = g.uniform_open();
      CHECK((v > 0.0 && v <= 1.0));
      CHECK(g.below(7) < 7);
    }
    CHECK(g.below(1) == 0);
  }

  TEST_CASE("normal and uniform moments") {
    Rng g(3);
    const int n = 200000;
    double s = 0, s2 = 0, u = 0;
    for (int i = 0; i < n; ++i) {
      const double z = g.normal();
      s += z;
      s2 += z * z;
      u += g.uniform();
    }
    CHECK(s / n == doctest::Approx(0.0).epsilon(0.01).scale(1.0));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(u / n == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("below is close to uniform") {
    Rng g(9);
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 60000; ++i) ++counts[g.below(6)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
  }

  TEST_CASE("shuffle is a permutation and reproducible") {
    std::vector<int> a(50), b;
    std::iota(a.begin(), a.end(), 0);
    b = a;
    Rng g1(1), g2(1);
    g1.shuffle(a);
    g2.shuffle(b);
    CHECK(a == b);
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  }
}
