#pragma once

// Finite-n degree sequences realized from limit distributions, the paired
// vertex/edge sequences that feed the configuration sampler, and the advisory
// admissibility probe (weak convergence / support / moment conditions).

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"

namespace hmg {

struct DegreeSequence {
  std::map<int, long long> counts;  // degree -> number of nodes

  long long n() const {
    long long s = 0;
    for (auto [k, c] : counts) s += c;
    return s;
  }
  long long stubs() const {
    long long s = 0;
    for (auto [k, c] : counts) s += static_cast<long long>(k) * c;
    return s;
  }
  // empirical falling-factorial moment sum_k (k)_j counts(k)/n
  double empirical_falling_moment(int j) const {
    double s = 0.0;
    for (auto [k, c] : counts) s += LimitDistribution::falling(k, j) * static_cast<double>(c);
    long long total = n();
    return total == 0 ? 0.0 : s / static_cast<double>(total);
  }
  double empirical_power_moment(int j) const {
    double s = 0.0;
    for (auto [k, c] : counts) s += std::pow(static_cast<double>(k), j) * static_cast<double>(c);
    long long total = n();
    return total == 0 ? 0.0 : s / static_cast<double>(total);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (auto [k, c] : counts) j[std::to_string(k)] = c;
    return j;
  }
  static DegreeSequence from_json(const nlohmann::json& j) {
    DegreeSequence s;
    for (auto& [key, val] : j.items()) s.counts[std::stoi(key)] = val.get<long long>();
    return s;
  }
};

namespace detail {

// Truncated support over which quotas are computed. For infinite supports the
// cut is deterministic in n: poisson keeps all degrees until the remaining
// tail is below half a node; the power law uses the n^(1/(alpha-1)) cutoff.
inline std::vector<int> realization_support(const LimitDistribution& dist, long long n) {
  std::vector<int> ks;
  switch (dist.kind()) {
    case DistKind::Dirac:
      ks.push_back(dist.dirac_degree());
      break;
    case DistKind::Finite:
      for (auto [k, p] : dist.table()) ks.push_back(k);
      break;
    case DistKind::Poisson: {
      double tail = 1.0;
      const double stop = 0.5 / std::max<long long>(n, 1);
      for (int k = 0; tail >= stop && k < 100000; ++k) {
        ks.push_back(k);
        tail -= dist.mass(k);
      }
      break;
    }
    case DistKind::PowerLaw: {
      int cutoff = static_cast<int>(
          std::ceil(std::pow(static_cast<double>(n), 1.0 / (dist.alpha() - 1.0))));
      cutoff = std::max(cutoff, dist.min_degree());
      for (int k = dist.min_degree(); k <= cutoff; ++k) ks.push_back(k);
      break;
    }
  }
  return ks;
}

}  // namespace detail

// Largest-remainder rounding of n * dist(k) over the truncated support.
// Deterministic; every represented degree lies in the support.
inline DegreeSequence realize_sequence(const LimitDistribution& dist, long long n) {
  if (n < 0) throw ConfigError("realize_sequence: negative n");
  DegreeSequence seq;
  if (n == 0) return seq;
  std::vector<int> ks = detail::realization_support(dist, n);
  double total_mass = 0.0;
  for (int k : ks) total_mass += dist.mass(k);
  std::vector<long long> floors(ks.size());
  std::vector<std::pair<double, int>> remainders;  // (-remainder, index) for sorting
  long long assigned = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    double quota = static_cast<double>(n) * dist.mass(ks[i]) / total_mass;
    floors[i] = static_cast<long long>(std::floor(quota));
    assigned += floors[i];
    remainders.push_back({-(quota - std::floor(quota)), static_cast<int>(i)});
  }
  std::sort(remainders.begin(), remainders.end());  // biggest remainder first, then smaller degree
  long long leftover = n - assigned;
  for (auto [negr, idx] : remainders) {
    if (leftover == 0) break;
    ++floors[idx];
    --leftover;
  }
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (floors[i] > 0) seq.counts[ks[i]] = floors[i];
  return seq;
}

struct SequencePair {
  DegreeSequence vertex_side;  // degrees of the n vertex nodes
  DegreeSequence edge_side;    // sizes of the hyper-edge nodes
  long long stubs = 0;         // shared stub total S
  long long repair_moves = 0;  // nodes added/removed on the edge side to equalize stubs
  long long vertex_stub_drops = 0;  // stubs removed on the vertex side (fallback rule only)
};

// Pair a realized vertex side with an edge side drawn from edist: the edge side
// is realized at m ~ S_v / E[d^e] and then repaired by adding/removing a
// bounded number of nodes with support sizes (smallest-first search). If the
// deficit is not a multiple of gcd(supp(d^e)), signals ParityError.
inline SequencePair pair_sequences(const DegreeSequence& vertex_side,
                                   const LimitDistribution& edist) {
  if (edist.min_support_degree() < 2)
    throw ConfigError("edge-size distribution must have support >= 2");
  SequencePair pair;
  pair.vertex_side = vertex_side;
  const long long sv = pair.vertex_side.stubs();
  const double emean = edist.mean();
  long long m = static_cast<long long>(std::llround(static_cast<double>(sv) / emean));
  pair.edge_side = realize_sequence(edist, std::max<long long>(m, 0));
  long long deficit = sv - pair.edge_side.stubs();

  if (deficit != 0) {
    // support degrees available for the repair (bounded list; consecutive
    // degrees make the gcd 1 for infinite supports)
    std::vector<int> ks = detail::realization_support(edist, std::max<long long>(m, 16));
    if (ks.size() > 12) ks.resize(12);
    long long g = 0;
    for (int k : ks) g = std::gcd(g, static_cast<long long>(k));
    if (g == 0 || deficit % g != 0)
      throw ParityError("cannot equalize stub totals: deficit " + std::to_string(deficit) +
                        " not a multiple of gcd of edge support");
    // BFS over residuals for the shortest add/remove sequence
    const long long maxk = ks.back();
    const long long bound = std::abs(deficit) + maxk;
    std::map<long long, std::pair<long long, int>> parent;  // residual -> (prev, +-k)
    std::deque<long long> queue{deficit};
    parent[deficit] = {deficit, 0};
    while (!queue.empty() && !parent.count(0)) {
      long long d = queue.front();
      queue.pop_front();
      for (int k : ks)
        for (int sgn : {-1, +1}) {
          long long nd = d - sgn * k;  // sgn=+1 adds a node of size k
          if (std::abs(nd) > bound || parent.count(nd)) continue;
          parent[nd] = {d, sgn * k};
          queue.push_back(nd);
        }
    }
    if (!parent.count(0))
      throw ParityError("cannot equalize stub totals within the edge support");
    for (long long d = 0; d != deficit;) {
      auto [prev, move] = parent[d];
      int k = std::abs(move);
      long long& cnt = pair.edge_side.counts[k];
      cnt += (move > 0) ? 1 : -1;
      ++pair.repair_moves;
      if (cnt < 0)
        throw ParityError("repair would remove more degree-" + std::to_string(k) +
                          " edges than exist");
      if (cnt == 0) pair.edge_side.counts.erase(k);
      d = prev;
    }
  }
  pair.stubs = pair.vertex_side.stubs();
  return pair;
}

// Realize both sides with a common stub total (vertex side realized at n).
inline SequencePair pair_sequences(const LimitDistribution& vdist, const LimitDistribution& edist,
                                   long long n) {
  return pair_sequences(realize_sequence(vdist, n), edist);
}

// pair_sequences plus the documented fallback for parity failures: convert one
// vertex node of the smallest positive degree k to degree k-1 (dropping one
// stub) and retry, at most 7 times. The perturbation is reported in
// vertex_stub_drops; it touches O(1) of the n nodes, so the empirical
// distribution is unchanged in the limit.
inline SequencePair pair_sequences_adjusted(const LimitDistribution& vdist,
                                            const LimitDistribution& edist, long long n) {
  DegreeSequence vs = realize_sequence(vdist, n);
  for (long long drops = 0;; ++drops) {
    try {
      SequencePair pair = pair_sequences(vs, edist);
      pair.vertex_stub_drops = drops;
      return pair;
    } catch (const ParityError&) {
      if (drops >= 7) throw;
      auto it = vs.counts.upper_bound(0);
      if (it == vs.counts.end()) throw;
      int k = it->first;
      if (--it->second == 0) vs.counts.erase(it);
      ++vs.counts[k - 1];
    }
  }
}

struct SideAdmissibility {
  bool weak_convergence = false;
  bool support_contained = false;
  bool second_moment_stable = false;   // condition (*)
  bool fourth_moment_vanishing = false;  // condition (**)
  std::vector<double> sup_distance;     // per probe, sup_k |counts(k)/n - mass(k)|
  std::vector<double> second_moment;    // per probe
  std::vector<double> fourth_over_n;    // per probe
  bool all() const {
    return weak_convergence && support_contained && second_moment_stable &&
           fourth_moment_vanishing;
  }
};

struct AdmissibilityReport {
  std::vector<long long> probes;
  SideAdmissibility vertex, edge;
  bool trivial = false;  // supp(d^v) within {0,1}: every component is a lone edge
  bool admissible() const { return vertex.all() && edge.all(); }
};

namespace detail {

inline SideAdmissibility side_admissibility(const std::vector<const DegreeSequence*>& seqs,
                                            const LimitDistribution& limit) {
  SideAdmissibility a;
  for (const DegreeSequence* s : seqs) {
    double total = static_cast<double>(s->n());
    double dist = 0.0;
    int kmax = s->counts.empty() ? 0 : s->counts.rbegin()->first;
    for (int k = 0; k <= kmax + 1; ++k) {
      auto it = s->counts.find(k);
      double emp = (it == s->counts.end() || total == 0) ? 0.0 : it->second / total;
      dist = std::max(dist, std::abs(emp - limit.mass(k)));
    }
    a.sup_distance.push_back(dist);
    a.second_moment.push_back(s->empirical_power_moment(2));
    a.fourth_over_n.push_back(total == 0 ? 0.0 : s->empirical_power_moment(4) / total);
  }
  a.weak_convergence =
      a.sup_distance.back() <= std::max(0.02, 0.5 * a.sup_distance.front());
  a.support_contained = true;
  for (std::size_t i = 1; i < seqs.size(); ++i)
    for (auto [k, c] : seqs[i]->counts)
      if (c > 0 && !limit.in_support(k)) a.support_contained = false;
  const double m2_first = a.second_moment.front(), m2_last = a.second_moment.back();
  const double m2_prev = a.second_moment[a.second_moment.size() - 2];
  a.second_moment_stable =
      std::isfinite(m2_last) && std::abs(m2_last - m2_prev) <= 0.1 * std::max(1.0, m2_prev) &&
      m2_last <= 2.0 * std::max(1.0, m2_first);
  a.fourth_moment_vanishing = a.fourth_over_n.back() < 0.75 * std::max(a.fourth_over_n.front(),
                                                                       1e-12);
  return a;
}

}  // namespace detail

// Advisory admissibility probe for a family of sequence pairs indexed by n.
// Verdicts: weak convergence of counts(k)/n, support containment beyond the
// first probe, empirical second moment stabilizing (condition (*)), and the
// fourth moment being o(n) (condition (**)). Needs >= 2 increasing probes.
inline AdmissibilityReport check_admissibility(
    const std::function<SequencePair(long long)>& family, const std::vector<long long>& probes,
    const LimitDistribution& vdist, const LimitDistribution& edist) {
  if (probes.size() < 2) throw ConfigError("check_admissibility: need at least two probes");
  AdmissibilityReport rep;
  rep.probes = probes;
  std::vector<SequencePair> pairs;
  pairs.reserve(probes.size());
  for (long long n : probes) pairs.push_back(family(n));
  std::vector<const DegreeSequence*> vs, es;
  for (auto& p : pairs) {
    vs.push_back(&p.vertex_side);
    es.push_back(&p.edge_side);
  }
  rep.vertex = detail::side_admissibility(vs, vdist);
  rep.edge = detail::side_admissibility(es, edist);
  SupportSet sv = vdist.support_set();
  rep.trivial = !sv.cofinite;
  if (rep.trivial)
    for (int k : sv.degrees)
      if (k > 1) rep.trivial = false;
  return rep;
}

}  // namespace hmg
