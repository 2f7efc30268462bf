#pragma once

// The bipartite configuration model: sample a uniform matching of vertex stubs
// to edge stubs, collapse to an incidence multigraph, and optionally condition
// (by rejection) on one of three simplicity levels:
//
//   simple_incidence  no repeated (v, e) pair;
//   hypergraph        no two e-nodes with the same member set (what the
//                     membership relation can see; repeated members inside a
//                     single e-node are invisible to it and not forbidden);
//   graph             all e-nodes of size 2, no loops, no parallel edges
//                     (requires an all-degree-2 edge side).
//
// Every attempt draws from its own RNG substream (seed, sample, attempt), so
// attempt k is byte-reproducible no matter how attempts < k went.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hmg/degree_sequence.hpp"
#include "hmg/errors.hpp"
#include "hmg/incidence.hpp"
#include "hmg/rng.hpp"

namespace hmg {

enum class Conditioning { None, SimpleIncidence, Hypergraph, Graph };

inline std::string to_string(Conditioning c) {
  switch (c) {
    case Conditioning::None: return "none";
    case Conditioning::SimpleIncidence: return "simple_incidence";
    case Conditioning::Hypergraph: return "hypergraph";
    case Conditioning::Graph: return "graph";
  }
  return "none";
}

inline Conditioning conditioning_from_string(const std::string& s) {
  if (s == "none") return Conditioning::None;
  if (s == "simple_incidence") return Conditioning::SimpleIncidence;
  if (s == "hypergraph") return Conditioning::Hypergraph;
  if (s == "graph") return Conditioning::Graph;
  throw ConfigError("unknown conditioning: " + s);
}

struct SampleOptions {
  std::uint64_t seed = 0;
  Conditioning conditioning = Conditioning::None;
  long long max_rejections = 1'000'000;
};

// A stub matching: stub s of the vertex side is matched to stub matching[s]
// of the edge side. Stubs are grouped by owner, owners ordered by degree.
struct Configuration {
  std::vector<int> v_owner;   // vertex stub -> v-node
  std::vector<int> e_owner;   // edge stub -> e-node
  std::vector<int> matching;  // vertex stub -> edge stub (a permutation)
  long long stub_count() const { return static_cast<long long>(matching.size()); }
};

namespace detail {

// stub -> owner array for a degree sequence (nodes numbered by ascending
// degree, each node's stubs contiguous)
inline std::vector<int> stub_owners(const DegreeSequence& seq) {
  std::vector<int> owner;
  owner.reserve(static_cast<std::size_t>(seq.stubs()));
  int node = 0;
  for (auto [k, c] : seq.counts)
    for (long long i = 0; i < c; ++i, ++node)
      for (int s = 0; s < k; ++s) owner.push_back(node);
  return owner;
}

}  // namespace detail

inline Configuration sample_configuration(const SequencePair& pair, Rng& rng) {
  if (pair.vertex_side.stubs() != pair.edge_side.stubs())
    throw ConfigError("stub totals differ between the two sides");
  Configuration c;
  c.v_owner = detail::stub_owners(pair.vertex_side);
  c.e_owner = detail::stub_owners(pair.edge_side);
  c.matching.resize(c.v_owner.size());
  for (std::size_t i = 0; i < c.matching.size(); ++i) c.matching[i] = static_cast<int>(i);
  rng.shuffle(c.matching);
  return c;
}

inline Configuration sample_configuration(const SequencePair& pair, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, {0});
  return sample_configuration(pair, rng);
}

inline IncidenceGraph collapse(const Configuration& c) {
  int n_v = c.v_owner.empty() ? 0 : c.v_owner.back() + 1;
  int n_e = c.e_owner.empty() ? 0 : c.e_owner.back() + 1;
  IncidenceGraph g(n_v, n_e);
  for (std::size_t s = 0; s < c.matching.size(); ++s)
    g.add_incidence(c.v_owner[s], c.e_owner[static_cast<std::size_t>(c.matching[s])]);
  return g;
}

inline bool satisfies(const IncidenceGraph& g, Conditioning c) {
  switch (c) {
    case Conditioning::None:
      return true;
    case Conditioning::SimpleIncidence:
      return g.simple_incidence();
    case Conditioning::Hypergraph:
      return g.no_duplicate_member_sets();
    case Conditioning::Graph: {
      // loops (an e-node with < 2 distinct members) or parallel pairs fail
      for (int e = 0; e < g.n_e(); ++e) {
        std::vector<int> mem = g.sorted_members(e);
        mem.erase(std::unique(mem.begin(), mem.end()), mem.end());
        if (mem.size() < 2) return false;
      }
      return g.no_duplicate_member_sets();
    }
  }
  return true;
}

inline void check_conditioning_precondition(const SequencePair& pair, Conditioning c) {
  if (c == Conditioning::Graph) {
    for (auto [k, cnt] : pair.edge_side.counts)
      if (cnt > 0 && k != 2)
        throw ConfigError("graph conditioning needs an all-degree-2 edge side; found size " +
                          std::to_string(k));
  }
}

struct SampledGraph {
  IncidenceGraph graph;
  long long attempts = 0;
};

// Rejection-sample until the conditioning predicate holds. Sample index `k`
// selects an independent substream family, so batches are reproducible and
// order-independent.
inline SampledGraph sample_incidence(const SequencePair& pair, const SampleOptions& opts,
                                     long long sample_index = 0) {
  if (opts.max_rejections < 1) throw ConfigError("max_rejections must be >= 1");
  check_conditioning_precondition(pair, opts.conditioning);
  for (long long attempt = 0; attempt < opts.max_rejections; ++attempt) {
    Rng rng = Rng::substream(opts.seed, {static_cast<std::uint64_t>(sample_index),
                                         static_cast<std::uint64_t>(attempt)});
    Configuration c = sample_configuration(pair, rng);
    IncidenceGraph g = collapse(c);
    if (satisfies(g, opts.conditioning)) return {std::move(g), attempt + 1};
  }
  // no acceptance in max_rejections tries; report the (upper-bound scale)
  // acceptance estimate 1/attempts
  throw ConditioningTooRareError(
      "no sample satisfied " + to_string(opts.conditioning) + " within " +
          std::to_string(opts.max_rejections) + " attempts",
      1.0 / static_cast<double>(opts.max_rejections));
}

struct AcceptanceEstimate {
  double frequency = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // 95% normal approximation
  long long successes = 0, trials = 0;
};

// Empirical acceptance fraction of the conditioning predicate over independent
// single attempts (one per trial).
inline AcceptanceEstimate acceptance_estimate(const SequencePair& pair, const SampleOptions& opts,
                                              long long trials) {
  if (trials < 1) throw ConfigError("acceptance_estimate needs trials >= 1");
  check_conditioning_precondition(pair, opts.conditioning);
  AcceptanceEstimate est;
  est.trials = trials;
  for (long long t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(opts.seed, {static_cast<std::uint64_t>(t), 0});
    Configuration c = sample_configuration(pair, rng);
    if (satisfies(collapse(c), opts.conditioning)) ++est.successes;
  }
  est.frequency = static_cast<double>(est.successes) / static_cast<double>(trials);
  double half = 1.96 * std::sqrt(est.frequency * (1.0 - est.frequency) /
                                 static_cast<double>(trials));
  est.ci_low = std::max(0.0, est.frequency - half);
  est.ci_high = std::min(1.0, est.frequency + half);
  return est;
}

}  // namespace hmg
