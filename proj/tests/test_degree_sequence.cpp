#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "hmg/degree_sequence.hpp"
#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"

using hmg::DegreeSequence;
using hmg::LimitDistribution;
using hmg::SequencePair;

TEST_CASE("realize dirac(3) at n=4") {
  DegreeSequence s = hmg::realize_sequence(LimitDistribution::dirac(3), 4);
  REQUIRE(s.counts == std::map<int, long long>{{3, 4}});
  REQUIRE(s.n() == 4);
  REQUIRE(s.stubs() == 12);
}

TEST_CASE("largest-remainder rounding: half 1, half 3 at odd n") {
  DegreeSequence s = hmg::realize_sequence(LimitDistribution::finite({{1, 0.5}, {3, 0.5}}), 5);
  // quotas 2.5 / 2.5; equal remainders break toward the smaller degree
  REQUIRE(s.counts == std::map<int, long long>{{1, 3}, {3, 2}});
}

TEST_CASE("realized poisson counts sit within one of their quotas") {
  auto d = LimitDistribution::poisson(2.0);
  DegreeSequence s = hmg::realize_sequence(d, 10000);
  REQUIRE(s.n() == 10000);
  for (auto [k, c] : s.counts) {
    double quota = 10000 * d.mass(k);
    REQUIRE(std::abs(c - quota) <= 1.0 + 1e-9);
  }
}

TEST_CASE("realized power law has the n^(1/(alpha-1)) cutoff") {
  auto d = LimitDistribution::power_law(3.5, 2);
  DegreeSequence s = hmg::realize_sequence(d, 20000);
  REQUIRE(s.n() == 20000);
  int kmax = s.counts.rbegin()->first;
  REQUIRE(kmax >= 20);   // ~ 20000^0.4 = 52, minus empty tail cells
  REQUIRE(kmax <= 60);
  REQUIRE(s.counts.at(2) > 10000);  // mass(2) ~ 0.77
}

TEST_CASE("pairing dirac(3) vertices with dirac(2) edges at n=4") {
  SequencePair p = hmg::pair_sequences(LimitDistribution::dirac(3), LimitDistribution::dirac(2), 4);
  REQUIRE(p.vertex_side.counts == std::map<int, long long>{{3, 4}});
  REQUIRE(p.edge_side.counts == std::map<int, long long>{{2, 6}});
  REQUIRE(p.stubs == 12);
  REQUIRE(p.repair_moves == 0);
}

TEST_CASE("odd stub total cannot be matched by size-2 edges") {
  REQUIRE_THROWS_AS(
      hmg::pair_sequences(LimitDistribution::dirac(3), LimitDistribution::dirac(2), 3),
      hmg::ParityError);
}

TEST_CASE("stub totals agree after repair for mixed sizes") {
  for (long long n : {7, 10, 33, 100}) {
    SequencePair p = hmg::pair_sequences(LimitDistribution::poisson(2.0),
                                         LimitDistribution::finite({{2, 0.5}, {3, 0.5}}), n);
    REQUIRE(p.vertex_side.stubs() == p.edge_side.stubs());
    REQUIRE(p.vertex_side.n() == n);
  }
}

TEST_CASE("edge-size distributions must have minimum size 2") {
  REQUIRE_THROWS_AS(
      hmg::pair_sequences(LimitDistribution::dirac(3), LimitDistribution::dirac(1), 4),
      hmg::ConfigError);
}

static SequencePair standard_family(const LimitDistribution& v, const LimitDistribution& e,
                                    long long n) {
  return hmg::pair_sequences(v, e, n);
}

TEST_CASE("admissibility: dirac(3)/dirac(2) passes everything") {
  auto v = LimitDistribution::dirac(3), e = LimitDistribution::dirac(2);
  auto rep = hmg::check_admissibility([&](long long n) { return standard_family(v, e, n); },
                                      {2000, 4000, 8000}, v, e);
  REQUIRE(rep.vertex.weak_convergence);
  REQUIRE(rep.vertex.support_contained);
  REQUIRE(rep.vertex.second_moment_stable);
  REQUIRE(rep.vertex.fourth_moment_vanishing);
  REQUIRE(rep.edge.all());
  REQUIRE(rep.admissible());
  REQUIRE(!rep.trivial);
}

TEST_CASE("admissibility: poisson(2)/dirac(2) passes") {
  auto v = LimitDistribution::poisson(2.0), e = LimitDistribution::dirac(2);
  auto rep = hmg::check_admissibility(
      [&](long long n) { return hmg::pair_sequences_adjusted(v, e, n); }, {2000, 4000, 8000}, v,
      e);
  REQUIRE(rep.admissible());
}

TEST_CASE("admissibility: power law alpha=2.5 fails the fourth-moment condition") {
  auto v = LimitDistribution::power_law(2.5, 1);
  auto e = LimitDistribution::finite({{2, 0.5}, {3, 0.5}});
  auto rep = hmg::check_admissibility([&](long long n) { return standard_family(v, e, n); },
                                      {2000, 4000, 8000, 16000}, v, e);
  REQUIRE(!rep.vertex.fourth_moment_vanishing);
  REQUIRE(!rep.admissible());
}

TEST_CASE("parity fallback drops exactly one stub when the total is odd") {
  // dirac(3) at n=3 gives S=9; one node 3 -> 2 makes S=8, matchable by 2-edges
  auto p = hmg::pair_sequences_adjusted(LimitDistribution::dirac(3), LimitDistribution::dirac(2), 3);
  REQUIRE(p.vertex_stub_drops == 1);
  REQUIRE(p.vertex_side.counts == std::map<int, long long>{{2, 1}, {3, 2}});
  REQUIRE(p.vertex_side.stubs() == 8);
  REQUIRE(p.edge_side.counts == std::map<int, long long>{{2, 4}});
}

TEST_CASE("admissibility: stray degree outside the limit support fails containment") {
  auto v = LimitDistribution::dirac(3), e = LimitDistribution::dirac(2);
  auto family = [&](long long n) {
    SequencePair p;
    p.vertex_side.counts[3] = n;
    if (n % 2 == 1) p.vertex_side.counts[5] = 1;  // intruder at odd probes
    long long s = p.vertex_side.stubs();
    if (s % 2 == 1) {
      p.vertex_side.counts[3] -= 1;  // keep the total matchable
      s -= 3;
      p.vertex_side.counts[2] += 1;
      s += 2;
    }
    p.edge_side.counts[2] = s / 2;
    p.stubs = s;
    return p;
  };
  auto rep = hmg::check_admissibility(family, {1000, 1001}, v, e);
  REQUIRE(!rep.vertex.support_contained);
  REQUIRE(!rep.admissible());
}

TEST_CASE("trivial flag: vertex support within {0,1}") {
  auto v = LimitDistribution::finite({{0, 0.5}, {1, 0.5}});
  auto e = LimitDistribution::dirac(2);
  auto rep = hmg::check_admissibility([&](long long n) { return standard_family(v, e, n); },
                                      {2000, 4000}, v, e);
  REQUIRE(rep.trivial);
}

TEST_CASE("degree sequence json round trip") {
  DegreeSequence s;
  s.counts = {{2, 5}, {7, 1}};
  auto back = DegreeSequence::from_json(s.to_json());
  REQUIRE(back.counts == s.counts);
}

TEST_CASE("empirical moments of a frozen sequence") {
  DegreeSequence s;
  s.counts = {{3, 2}, {5, 2}};  // half 3, half 5
  REQUIRE(s.empirical_falling_moment(2) == Catch::Approx(13.0));
  REQUIRE(s.empirical_power_moment(2) == Catch::Approx((9.0 + 9.0 + 25.0 + 25.0) / 4.0));
}
