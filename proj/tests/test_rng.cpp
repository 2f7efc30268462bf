#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "hmg/rng.hpp"

using hmg::Rng;

TEST_CASE("same seed gives identical draw sequences") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());
}

TEST_CASE("different seeds give different sequences") {
  Rng a(1), b(2);
  int diff = 0;
  for (int i = 0; i < 16; ++i) diff += a.next() != b.next();
  REQUIRE(diff > 0);
}

TEST_CASE("substreams depend only on (seed, path), not on other streams' consumption") {
  Rng s1 = Rng::substream(99, {7, 3});
  // consume an unrelated substream heavily, then re-derive
  Rng other = Rng::substream(99, {7, 2});
  for (int i = 0; i < 1000; ++i) (void)other.next();
  Rng s2 = Rng::substream(99, {7, 3});
  for (int i = 0; i < 50; ++i) REQUIRE(s1.next() == s2.next());
}

TEST_CASE("substream paths that differ give distinct streams") {
  Rng a = Rng::substream(42, {0});
  Rng b = Rng::substream(42, {1});
  Rng c = Rng::substream(42, {0, 0});
  std::vector<std::uint64_t> av, bv, cv;
  for (int i = 0; i < 8; ++i) {
    av.push_back(a.next());
    bv.push_back(b.next());
    cv.push_back(c.next());
  }
  REQUIRE(av != bv);
  REQUIRE(av != cv);
  REQUIRE(bv != cv);
}

TEST_CASE("below(n) stays in range and is roughly uniform") {
  Rng r(7);
  std::vector<int> hits(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    auto v = r.below(10);
    REQUIRE(v < 10);
    ++hits[static_cast<std::size_t>(v)];
  }
  for (int h : hits) {
    REQUIRE(h > draws / 10 - 600);  // ~6 sigma around 10000
    REQUIRE(h < draws / 10 + 600);
  }
}

TEST_CASE("uniform01 lies in [0,1) with sane mean") {
  Rng r(11);
  double sum = 0.0;
  for (int i = 0; i < 50000; ++i) {
    double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  REQUIRE(sum / 50000 == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("poisson draws have the right mean and variance") {
  Rng r(13);
  const double mean = 2.0;
  double sum = 0, sumsq = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    int k = r.poisson(mean);
    sum += k;
    sumsq += static_cast<double>(k) * k;
  }
  double m = sum / draws;
  double var = sumsq / draws - m * m;
  REQUIRE(m == Catch::Approx(mean).margin(0.02));
  REQUIRE(var == Catch::Approx(mean).margin(0.05));
}

TEST_CASE("shuffle yields a permutation and each position is roughly uniform") {
  Rng r(17);
  // frequency of value 0 landing at each position over many shuffles of size 8
  std::vector<int> pos_hits(8, 0);
  const int reps = 80000;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<int> v(8);
    std::iota(v.begin(), v.end(), 0);
    r.shuffle(v);
    std::vector<int> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 8; ++i) REQUIRE(sorted[static_cast<std::size_t>(i)] == i);
    for (int i = 0; i < 8; ++i)
      if (v[static_cast<std::size_t>(i)] == 0) ++pos_hits[static_cast<std::size_t>(i)];
  }
  for (int h : pos_hits) {
    REQUIRE(h > reps / 8 - 700);
    REQUIRE(h < reps / 8 + 700);
  }
}
