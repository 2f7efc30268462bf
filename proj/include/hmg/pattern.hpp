#pragma once

// Exact realisation counting for small connected bipartite patterns, the
// automorphism bookkeeping behind it, the asymptotic expected-count formula,
// cycle censuses, and the catalogue of excess-1 patterns.
//
// Counting semantics: a *realisation* of H in G is a sub-multigraph copy — a
// choice of distinct nodes plus a choice of ∈-edges realizing H's
// multiplicities. With φ ranging over injective side-preserving node maps that
// respect multiplicities,
//
//   realisations(H, G) = Σ_φ Π_{(v,e) ∈ H} C(mult_G(φv, φe), mult_H(v, e))
//                        / |Aut(H)|
//
// where Aut(H) is the side-preserving node-automorphism group (parallel
// ∈-edges are interchangeable through the binomial factors, not through Aut).
// The expected-count formula divides by |Aut(H)| · Π mult! accordingly.
//
// For counting in large sparse graphs the enumeration is seeded ("anchored")
// at a short cycle of H — a parallel incidence, a 4-cycle, or a 6-cycle —
// whose instances in G are cheap to list; the rest of H is matched by local
// backtracking. Patterns without such a cycle (trees, long single cycles)
// fall back to unseeded enumeration, which is fine at desk scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hmg/canonical.hpp"
#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"
#include "hmg/incidence.hpp"

namespace hmg {

struct Pattern {
  IncidenceGraph graph;
  std::string name;
  bool relaxed = false;  // permits e-nodes of degree < 2 (raw bipartite fragments)
};

inline Pattern make_pattern(IncidenceGraph g, std::string name, bool relaxed = false) {
  if (g.n_nodes() == 0) throw PatternError("empty pattern");
  if (!canon_detail::is_connected(g)) throw PatternError("pattern must be connected: " + name);
  if (!relaxed)
    for (int e = 0; e < g.n_e(); ++e)
      if (g.degree(NodeRef{Side::E, e}) < 2)
        throw PatternError("e-node of degree < 2 in non-relaxed pattern: " + name);
  return Pattern{std::move(g), std::move(name), relaxed};
}

struct AutomorphismCount {
  long long c_v = 0;      // automorphisms fixing every e-node pointwise
  long long c_e = 0;      // automorphisms fixing every v-node pointwise
  long long total = 0;    // full side-preserving automorphism group order
  bool product_differs = false;  // c_v * c_e != total (formula divisor uses total)
};

namespace census_detail {

inline long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// count side- and multiplicity-preserving bijections of h onto itself, with
// one side optionally pinned to the identity; `colors`, when given, is a
// per-unified-node label that automorphisms must preserve (used for patterns
// whose nodes carry exact-degree decorations)
inline long long count_automorphisms(const IncidenceGraph& h, bool pin_v, bool pin_e,
                                     const std::vector<long long>* colors = nullptr) {
  const int n = h.n_nodes();
  std::vector<int> image(n, -1);
  std::vector<char> used(n, 0);
  long long found = 0;

  std::function<void(int)> rec = [&](int x) {
    if (x == n) {
      ++found;
      return;
    }
    NodeRef rx = h.ref_of(x);
    bool pinned = (rx.side == Side::V && pin_v) || (rx.side == Side::E && pin_e);
    for (int y = 0; y < n; ++y) {
      if (pinned && y != x) continue;
      if (used[y]) continue;
      NodeRef ry = h.ref_of(y);
      if (ry.side != rx.side || h.degree(ry) != h.degree(rx)) continue;
      if (colors && (*colors)[y] != (*colors)[x]) continue;
      // multiplicities toward already-mapped nodes must match exactly
      bool ok = true;
      if (rx.side == Side::V) {
        for (int z = 0; ok && z < x; ++z) {
          NodeRef rz = h.ref_of(z);
          if (rz.side != Side::E) continue;
          if (h.multiplicity(rx.index, rz.index) !=
              h.multiplicity(ry.index, h.ref_of(image[z]).index))
            ok = false;
        }
      } else {
        for (int z = 0; ok && z < x; ++z) {
          NodeRef rz = h.ref_of(z);
          if (rz.side != Side::V) continue;
          if (h.multiplicity(rz.index, rx.index) !=
              h.multiplicity(h.ref_of(image[z]).index, ry.index))
            ok = false;
        }
      }
      if (!ok) continue;
      image[x] = y;
      used[y] = 1;
      rec(x + 1);
      used[y] = 0;
      image[x] = -1;
    }
  };
  rec(0);
  return found;
}

}  // namespace census_detail

inline AutomorphismCount automorphisms(const Pattern& h) {
  AutomorphismCount a;
  a.total = census_detail::count_automorphisms(h.graph, false, false);
  a.c_v = census_detail::count_automorphisms(h.graph, false, true);  // E pinned, V moves
  a.c_e = census_detail::count_automorphisms(h.graph, true, false);
  a.product_differs = a.c_v * a.c_e != a.total;
  return a;
}

// ---------------------------------------------------------------------------
// embedding enumeration

namespace census_detail {

// Placement plan: seeds first, then remaining H nodes in BFS order so every
// step has at least one already-placed neighbour.
struct EmbedPlan {
  struct Back {
    int pos;         // earlier position in the placement order
    long long mult;  // required multiplicity of the H edge
  };
  struct Step {
    int hid = 0;  // unified H node id
    Side side = Side::V;
    std::vector<Back> backs;
  };
  std::vector<int> order;  // position -> unified H id (seeds first)
  std::vector<Step> steps;  // one per non-seed position, aligned from seed_count
  int seed_count = 0;
  std::vector<std::array<long long, 3>> seed_edges;  // (posA, posB, mult) among seeds
};

inline long long h_mult(const IncidenceGraph& h, int ida, int idb) {
  NodeRef a = h.ref_of(ida), b = h.ref_of(idb);
  if (a.side == b.side) return 0;
  return a.side == Side::V ? h.multiplicity(a.index, b.index)
                           : h.multiplicity(b.index, a.index);
}

inline long long g_mult(const IncidenceGraph& g, int ida, int idb) {
  NodeRef a = g.ref_of(ida), b = g.ref_of(idb);
  if (a.side == b.side) return 0;
  return a.side == Side::V ? g.multiplicity(a.index, b.index)
                           : g.multiplicity(b.index, a.index);
}

inline EmbedPlan make_plan(const IncidenceGraph& h, const std::vector<int>& seeds) {
  EmbedPlan plan;
  plan.seed_count = static_cast<int>(seeds.size());
  std::vector<int> pos_of(h.n_nodes(), -1);
  for (int i = 0; i < plan.seed_count; ++i) {
    plan.order.push_back(seeds[static_cast<std::size_t>(i)]);
    pos_of[seeds[static_cast<std::size_t>(i)]] = i;
  }
  for (int i = 0; i < plan.seed_count; ++i)
    for (int j = i + 1; j < plan.seed_count; ++j) {
      long long mult = h_mult(h, plan.order[static_cast<std::size_t>(i)],
                              plan.order[static_cast<std::size_t>(j)]);
      if (mult > 0) plan.seed_edges.push_back({i, j, mult});
    }
  // BFS outward from the seeds
  for (std::size_t head = 0; head < plan.order.size(); ++head) {
    int cur = plan.order[head];
    std::vector<NodeRef> nb = h.neighbors(h.ref_of(cur));
    std::vector<int> ids;
    for (NodeRef r : nb) ids.push_back(h.id_of(r));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int nxt : ids) {
      if (pos_of[nxt] >= 0) continue;
      pos_of[nxt] = static_cast<int>(plan.order.size());
      plan.order.push_back(nxt);
    }
  }
  // any H node unreached means the seeds were not in h's component
  for (int x = 0; x < h.n_nodes(); ++x)
    if (pos_of[x] < 0) throw PatternError("pattern is disconnected");
  // back-edges for each non-seed position
  for (std::size_t p = static_cast<std::size_t>(plan.seed_count); p < plan.order.size(); ++p) {
    EmbedPlan::Step step;
    step.hid = plan.order[p];
    step.side = h.ref_of(step.hid).side;
    for (std::size_t q = 0; q < p; ++q) {
      long long mult = h_mult(h, step.hid, plan.order[q]);
      if (mult > 0) step.backs.push_back({static_cast<int>(q), mult});
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

// Sum of binomial weights over all injective extensions of the seeded images.
inline long long extend_count(const IncidenceGraph& g, const EmbedPlan& plan,
                              std::vector<int>& image, std::vector<char>& used,
                              std::size_t step_idx, long long weight) {
  if (step_idx == plan.steps.size()) return weight;
  const EmbedPlan::Step& step = plan.steps[step_idx];
  // candidates: distinct neighbours of the first anchored back-reference
  const EmbedPlan::Back& lead = step.backs.front();
  int from = image[static_cast<std::size_t>(lead.pos)];
  std::vector<NodeRef> nb = g.neighbors(g.ref_of(from));
  std::vector<int> cand;
  for (NodeRef r : nb) cand.push_back(g.id_of(r));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  long long total = 0;
  for (int c : cand) {
    if (used[static_cast<std::size_t>(c)]) continue;
    if (g.ref_of(c).side != step.side) continue;
    long long w = weight;
    for (const EmbedPlan::Back& b : step.backs) {
      long long gm = g_mult(g, c, image[static_cast<std::size_t>(b.pos)]);
      if (gm < b.mult) {
        w = 0;
        break;
      }
      w *= binom(gm, b.mult);
    }
    if (w == 0) continue;
    image[static_cast<std::size_t>(plan.seed_count) + step_idx] = c;
    used[static_cast<std::size_t>(c)] = 1;
    total += extend_count(g, plan, image, used, step_idx + 1, w);
    used[static_cast<std::size_t>(c)] = 0;
  }
  return total;
}

// weight of the seed placement itself (0 if some required multiplicity is absent)
inline long long seed_weight(const IncidenceGraph& g, const EmbedPlan& plan,
                             const std::vector<int>& image) {
  long long w = 1;
  for (const auto& [a, b, mult] : plan.seed_edges) {
    long long gm = g_mult(g, image[static_cast<std::size_t>(a)],
                          image[static_cast<std::size_t>(b)]);
    if (gm < mult) return 0;
    w *= binom(gm, mult);
  }
  return w;
}

// --- anchor discovery in the pattern -------------------------------------

// a (v,e) incidence of multiplicity >= 2, as unified ids
inline std::vector<int> find_parallel_anchor(const IncidenceGraph& h) {
  for (int v = 0; v < h.n_v(); ++v) {
    std::vector<int> es = h.edges_of(v);
    std::sort(es.begin(), es.end());
    for (std::size_t i = 0; i + 1 < es.size(); ++i)
      if (es[i] == es[i + 1]) return {v, h.n_v() + es[i]};
  }
  return {};
}

// vertex-pair -> sorted distinct witnesses (e-nodes containing both)
inline std::map<std::pair<int, int>, std::vector<int>> pair_witnesses(const IncidenceGraph& g) {
  std::map<std::pair<int, int>, std::vector<int>> w;
  for (int e = 0; e < g.n_e(); ++e) {
    std::vector<int> mem = g.sorted_members(e);
    mem.erase(std::unique(mem.begin(), mem.end()), mem.end());
    for (std::size_t i = 0; i < mem.size(); ++i)
      for (std::size_t j = i + 1; j < mem.size(); ++j) w[{mem[i], mem[j]}].push_back(e);
  }
  return w;
}

// a 4-cycle of h as unified ids (v1, e1, v2, e2), or empty
inline std::vector<int> find_four_cycle(const IncidenceGraph& h) {
  auto w = pair_witnesses(h);
  for (auto& [pair, es] : w)
    if (es.size() >= 2)
      return {pair.first, h.n_v() + es[0], pair.second, h.n_v() + es[1]};
  return {};
}

// a 6-cycle of h as unified ids (v1, e1, v2, e2, v3, e3), or empty
inline std::vector<int> find_six_cycle(const IncidenceGraph& h) {
  auto w = pair_witnesses(h);
  for (auto& [puv, wuv] : w)
    for (auto& [pvw, wvw] : w) {
      if (pvw.first != puv.second) continue;  // chain u < v < w
      auto it = w.find({puv.first, pvw.second});
      if (it == w.end()) continue;
      for (int f1 : wuv)
        for (int f2 : wvw)
          for (int f3 : it->second)
            if (f1 != f2 && f2 != f3 && f1 != f3)
              return {puv.first,  h.n_v() + f1, puv.second,
                      h.n_v() + f2, pvw.second, h.n_v() + f3};
    }
  return {};
}

}  // namespace census_detail

// --- anchor instance index over a host graph -------------------------------

// Anchor a pattern's enumeration is seeded at: its most constrained short
// cycle. 2 = parallel incidence, 4 = quadrilateral, 6 = hexagon, 0 = none
// (trees and longer single cycles fall back to unseeded enumeration).
inline int anchor_kind(const IncidenceGraph& h) {
  if (!census_detail::find_parallel_anchor(h).empty()) return 2;
  if (!census_detail::find_four_cycle(h).empty()) return 4;
  if (!census_detail::find_six_cycle(h).empty()) return 6;
  return 0;
}

// Precomputes the short-cycle instances counting is seeded at, so one sampled
// graph can be censused against many patterns. Construction is a sort-based
// co-membership scan, O(Σ deg(e)² + sort). `level` bounds the work: 2 indexes
// parallel pairs only, 4 adds quadrilaterals, 6 (default) adds hexagons;
// counting a pattern whose anchor exceeds the level is an error.
struct HostIndex {
  const IncidenceGraph& g;
  int level;
  std::vector<std::pair<int, int>> parallel_pairs;  // (v, e) with mult >= 2
  std::vector<std::array<int, 4>> four_instances;   // u < u', e_i < e_j (circuit u e_i u' e_j)
  std::vector<std::array<int, 6>> six_instances;    // u < v < x, f_uv, f_vx, f_ux distinct

  explicit HostIndex(const IncidenceGraph& host, int max_anchor_level = 6)
      : g(host), level(max_anchor_level) {
    for (int v = 0; v < g.n_v(); ++v) {
      std::vector<int> es = g.edges_of(v);
      std::sort(es.begin(), es.end());
      for (std::size_t i = 0; i < es.size();) {
        std::size_t j = i;
        while (j < es.size() && es[j] == es[i]) ++j;
        if (j - i >= 2) parallel_pairs.push_back({v, es[i]});
        i = j;
      }
    }
    if (level < 4) return;
    // co-membership triples packed as (u << 42) | (v << 21) | e for fast sort
    std::vector<std::uint64_t> triples;
    for (int e = 0; e < g.n_e(); ++e) {
      std::vector<int> mem = g.sorted_members(e);
      mem.erase(std::unique(mem.begin(), mem.end()), mem.end());
      for (std::size_t i = 0; i < mem.size(); ++i)
        for (std::size_t j = i + 1; j < mem.size(); ++j)
          triples.push_back((static_cast<std::uint64_t>(mem[i]) << 42) |
                            (static_cast<std::uint64_t>(mem[j]) << 21) |
                            static_cast<std::uint64_t>(e));
    }
    std::sort(triples.begin(), triples.end());
    auto part_u = [](std::uint64_t t) { return static_cast<int>(t >> 42); };
    auto part_v = [](std::uint64_t t) { return static_cast<int>((t >> 21) & 0x1FFFFF); };
    auto part_e = [](std::uint64_t t) { return static_cast<int>(t & 0x1FFFFF); };
    struct Group {
      int u, v;
      std::size_t off, len;
    };
    std::vector<Group> groups;
    std::vector<std::vector<int>> co;
    if (level >= 6) co.resize(static_cast<std::size_t>(g.n_v()));
    for (std::size_t i = 0; i < triples.size();) {
      std::size_t j = i;
      while (j < triples.size() && (triples[j] >> 21) == (triples[i] >> 21)) ++j;
      int u = part_u(triples[i]), v = part_v(triples[i]);
      if (level >= 6) {
        groups.push_back({u, v, i, j - i});
        co[static_cast<std::size_t>(u)].push_back(v);
        co[static_cast<std::size_t>(v)].push_back(u);
      }
      for (std::size_t a = i; a < j; ++a)
        for (std::size_t b = a + 1; b < j; ++b)
          four_instances.push_back({u, v, part_e(triples[a]), part_e(triples[b])});
      i = j;
    }
    if (level < 6) return;
    // each co list is ascending because the triples were sorted
    auto witnesses = [&](int a, int b) {
      std::uint64_t probe = (static_cast<std::uint64_t>(a) << 42) |
                            (static_cast<std::uint64_t>(b) << 21);
      auto it = std::lower_bound(groups.begin(), groups.end(), probe,
                                 [](const Group& grp, std::uint64_t key) {
                                   std::uint64_t gk = (static_cast<std::uint64_t>(grp.u) << 42) |
                                                      (static_cast<std::uint64_t>(grp.v) << 21);
                                   return gk < key;
                                 });
      return std::pair<std::size_t, std::size_t>(it->off, it->len);
    };
    for (const Group& grp : groups) {
      int u = grp.u, v = grp.v;
      std::vector<int> common;
      std::set_intersection(co[static_cast<std::size_t>(u)].begin(),
                            co[static_cast<std::size_t>(u)].end(),
                            co[static_cast<std::size_t>(v)].begin(),
                            co[static_cast<std::size_t>(v)].end(), std::back_inserter(common));
      for (int x : common) {
        if (x <= v) continue;  // triangle rooted at its sorted triple u < v < x
        auto [ovx, lvx] = witnesses(v, x);
        auto [oux, lux] = witnesses(u, x);
        for (std::size_t a = grp.off; a < grp.off + grp.len; ++a)
          for (std::size_t b = ovx; b < ovx + lvx; ++b)
            for (std::size_t c = oux; c < oux + lux; ++c) {
              int f1 = part_e(triples[a]), f2 = part_e(triples[b]), f3 = part_e(triples[c]);
              if (f1 == f2 || f2 == f3 || f1 == f3) continue;
              six_instances.push_back({u, v, x, f1, f2, f3});
            }
      }
    }
  }
};

namespace census_detail {

// weighted realisation total: Σ over seeded placements and extensions
inline long long count_weighted(const IncidenceGraph& h, const HostIndex& index) {
  const IncidenceGraph& g = index.g;
  std::vector<int> anchor = find_parallel_anchor(h);
  enum class Kind { Parallel, Four, Six, Generic } kind = Kind::Generic;
  if (!anchor.empty())
    kind = Kind::Parallel;
  else if (!(anchor = find_four_cycle(h)).empty())
    kind = Kind::Four;
  else if (!(anchor = find_six_cycle(h)).empty())
    kind = Kind::Six;
  else
    anchor = {0};  // generic: unseeded, first node of h

  if ((kind == Kind::Four && index.level < 4) || (kind == Kind::Six && index.level < 6))
    throw PatternError("host index level too low for this pattern's anchor");

  EmbedPlan plan = make_plan(h, anchor);
  std::vector<int> image(plan.order.size(), -1);
  std::vector<char> used(static_cast<std::size_t>(g.n_nodes()), 0);
  long long total = 0;

  auto run_seed = [&](std::initializer_list<int> gids) {
    std::size_t i = 0;
    for (int gid : gids) image[i++] = gid;
    long long w = seed_weight(g, plan, image);
    if (w == 0) return;
    for (int gid : gids) used[static_cast<std::size_t>(gid)] = 1;
    total += extend_count(g, plan, image, used, 0, w);
    for (int gid : gids) used[static_cast<std::size_t>(gid)] = 0;
  };

  switch (kind) {
    case Kind::Parallel:
      for (auto [v, e] : index.parallel_pairs) run_seed({v, g.n_v() + e});
      break;
    case Kind::Four:
      for (const auto& [u, up, ei, ej] : index.four_instances) {
        int f = g.n_v() + ei, fp = g.n_v() + ej;
        // all ordered placements of the pattern 4-cycle on this instance
        run_seed({u, f, up, fp});
        run_seed({u, fp, up, f});
        run_seed({up, f, u, fp});
        run_seed({up, fp, u, f});
      }
      break;
    case Kind::Six:
      for (const auto& inst : index.six_instances) {
        int u = inst[0], v = inst[1], x = inst[2];
        int F1 = g.n_v() + inst[3], F2 = g.n_v() + inst[4], F3 = g.n_v() + inst[5];
        // 6 rotations/reflections of the hexagon (u, F1, v, F2, x, F3)
        run_seed({u, F1, v, F2, x, F3});
        run_seed({v, F2, x, F3, u, F1});
        run_seed({x, F3, u, F1, v, F2});
        run_seed({u, F3, x, F2, v, F1});
        run_seed({x, F2, v, F1, u, F3});
        run_seed({v, F1, u, F3, x, F2});
      }
      break;
    case Kind::Generic: {
      Side s = h.ref_of(anchor[0]).side;
      int lo = s == Side::V ? 0 : g.n_v();
      int hi = s == Side::V ? g.n_v() : g.n_nodes();
      for (int gid = lo; gid < hi; ++gid) run_seed({gid});
      break;
    }
  }
  return total;
}

}  // namespace census_detail

// Raw count of injective side-preserving homomorphisms (each must respect
// multiplicities as lower bounds; no binomial weights, no Aut division).
inline long long count_injections(const Pattern& h, const IncidenceGraph& g) {
  // direct enumeration: candidates must carry at least the pattern's
  // multiplicity on every placed edge, but each map counts once (no weights)
  const IncidenceGraph& hg = h.graph;
  std::vector<int> order;  // BFS from node 0
  order.push_back(0);
  std::vector<int> pos_of(hg.n_nodes(), -1);
  pos_of[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (NodeRef r : hg.neighbors(hg.ref_of(order[head]))) {
      int id = hg.id_of(r);
      if (pos_of[id] < 0) {
        pos_of[id] = static_cast<int>(order.size());
        order.push_back(id);
      }
    }
  }
  if (static_cast<int>(order.size()) != hg.n_nodes())
    throw PatternError("pattern is disconnected");
  std::vector<int> image(order.size(), -1);
  std::vector<char> used(g.n_nodes(), 0);
  long long found = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t p) {
    if (p == order.size()) {
      ++found;
      return;
    }
    int hid = order[p];
    Side side = hg.ref_of(hid).side;
    // candidates: all nodes for p=0, neighbours of a placed neighbour after
    std::vector<int> cand;
    if (p == 0) {
      int lo = side == Side::V ? 0 : g.n_v();
      int hi = side == Side::V ? g.n_v() : g.n_nodes();
      for (int gid = lo; gid < hi; ++gid) cand.push_back(gid);
    } else {
      int back = -1;
      for (std::size_t q = 0; q < p; ++q)
        if (census_detail::h_mult(hg, hid, order[q]) > 0) {
          back = image[q];
          break;
        }
      for (NodeRef r : g.neighbors(g.ref_of(back))) cand.push_back(g.id_of(r));
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    }
    for (int c : cand) {
      if (used[static_cast<std::size_t>(c)] || g.ref_of(c).side != side) continue;
      bool ok = true;
      for (std::size_t q = 0; ok && q < p; ++q) {
        long long hm = census_detail::h_mult(hg, hid, order[q]);
        if (hm > 0 && census_detail::g_mult(g, c, image[q]) < hm) ok = false;
      }
      if (!ok) continue;
      image[p] = c;
      used[static_cast<std::size_t>(c)] = 1;
      rec(p + 1);
      used[static_cast<std::size_t>(c)] = 0;
    }
  };
  rec(0);
  return found;
}

// Number of realisations (sub-multigraph copies) of h in the indexed host.
// The index form lets one sampled graph be censused against many patterns.
inline long long count_realisations(const Pattern& h, const HostIndex& index) {
  long long weighted = census_detail::count_weighted(h.graph, index);
  long long aut = census_detail::count_automorphisms(h.graph, false, false);
  if (weighted % aut != 0)
    throw PatternError("internal: weighted embedding total " + std::to_string(weighted) +
                       " not divisible by |Aut| = " + std::to_string(aut));
  return weighted / aut;
}

inline long long count_realisations(const Pattern& h, const IncidenceGraph& g) {
  return count_realisations(h, HostIndex(g));
}

// ---------------------------------------------------------------------------
// the Lemma-style expected-count formula

struct ExpectedCount {
  double value = 0.0;
  long long excess = 0;
  long long n = 0;  // instance size the value refers to (irrelevant when excess = 0)
};

// n^{-exc} · Π E[(dᵛ)_deg] Π E[(dᵉ)_deg] / (|Aut|·Πmult! · (Edᵛ)^{m-k_e} (Edᵉ)^{k_e})
inline ExpectedCount expected_realisations(const Pattern& h, const LimitDistribution& vdist,
                                           const LimitDistribution& edist, long long n) {
  const IncidenceGraph& g = h.graph;
  ExpectedCount out;
  out.excess = excess(g);
  out.n = n;
  double num = 1.0;
  for (int v = 0; v < g.n_v(); ++v) num *= vdist.falling_moment(g.degree(NodeRef{Side::V, v}));
  for (int e = 0; e < g.n_e(); ++e) num *= edist.falling_moment(g.degree(NodeRef{Side::E, e}));
  long long divisor = census_detail::count_automorphisms(g, false, false);
  for (int v = 0; v < g.n_v(); ++v) {
    std::vector<int> es = g.edges_of(v);
    std::sort(es.begin(), es.end());
    for (std::size_t i = 0; i < es.size();) {
      std::size_t j = i;
      while (j < es.size() && es[j] == es[i]) ++j;
      for (std::size_t k = 2; k <= j - i; ++k) divisor *= static_cast<long long>(k);
      i = j;
    }
  }
  const long long m = g.m(), k_e = g.n_e();
  double den = static_cast<double>(divisor) *
               std::pow(vdist.mean(), static_cast<double>(m - k_e)) *
               std::pow(edist.mean(), static_cast<double>(k_e));
  out.value = std::pow(static_cast<double>(n), -static_cast<double>(out.excess)) * num / den;
  return out;
}

// The graph case (all edges of size 2): Edᵉ = E[(dᵉ)₂] = 2, so the edge factor
// collapses; exposed separately to make the cancellation testable.
inline ExpectedCount graph_case_reduction(const Pattern& h, const LimitDistribution& vdist,
                                          long long n = 1) {
  for (int e = 0; e < h.graph.n_e(); ++e)
    if (h.graph.degree(NodeRef{Side::E, e}) != 2)
      throw PatternError("graph-case pattern must have all e-node degrees 2");
  return expected_realisations(h, vdist, LimitDistribution::dirac(2), n);
}

// λ of the repeated-incidence (2-cycle) type: E[(dᵛ)₂]E[(dᵉ)₂] / (2 Edᵛ Edᵉ)
inline double lambda_multi_incidence(const LimitDistribution& vdist,
                                     const LimitDistribution& edist) {
  return vdist.falling_moment(2) * edist.falling_moment(2) / (2.0 * vdist.mean() * edist.mean());
}

// λ of the duplicate-hyper-edge (bipartite 4-cycle) type:
// (E[(dᵛ)₂])²(E[(dᵉ)₂])² / (4 (Edᵛ)² (Edᵉ)²); P(no duplicate) -> exp(-λ)
inline double lambda_hypergraph(const LimitDistribution& vdist, const LimitDistribution& edist) {
  double a = vdist.falling_moment(2), b = edist.falling_moment(2);
  double mv = vdist.mean(), me = edist.mean();
  return a * a * b * b / (4.0 * mv * mv * me * me);
}

// ---------------------------------------------------------------------------
// cycle census

// Counts of cycles by node count: key 2 = parallel incidence pairs Σ C(mult,2)
// (cycles through 2 nodes); keys 4, 6, ... = simple cycles of the underlying
// distinct-adjacency bipartite graph. The 4-bucket is computed by co-degree
// hashing; longer cycles by bounded DFS.
inline std::map<int, long long> unicyclic_cycle_census(const IncidenceGraph& g,
                                                       int max_cycle_nodes) {
  std::map<int, long long> out;
  if (max_cycle_nodes >= 2) {
    long long pairs = 0;
    for (int v = 0; v < g.n_v(); ++v) {
      std::vector<int> es = g.edges_of(v);
      std::sort(es.begin(), es.end());
      for (std::size_t i = 0; i < es.size();) {
        std::size_t j = i;
        while (j < es.size() && es[j] == es[i]) ++j;
        pairs += census_detail::binom(static_cast<long long>(j - i), 2);
        i = j;
      }
    }
    if (pairs > 0) out[2] = pairs;
  }
  if (max_cycle_nodes >= 4) {
    long long four = 0;
    for (auto& [pair, es] : census_detail::pair_witnesses(g))
      four += census_detail::binom(static_cast<long long>(es.size()), 2);
    if (four > 0) out[4] = four;
  }
  if (max_cycle_nodes >= 6) {
    // DFS over the distinct-neighbour graph; each cycle found once by rooting
    // at its minimum node and orienting toward the smaller second node
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n_nodes()));
    for (int v = 0; v < g.n_v(); ++v) {
      std::vector<int> es = g.edges_of(v);
      std::sort(es.begin(), es.end());
      es.erase(std::unique(es.begin(), es.end()), es.end());
      for (int e : es) {
        adj[static_cast<std::size_t>(v)].push_back(g.n_v() + e);
        adj[static_cast<std::size_t>(g.n_v() + e)].push_back(v);
      }
    }
    std::vector<char> on_path(static_cast<std::size_t>(g.n_nodes()), 0);
    std::vector<int> path;
    std::function<void(int, int)> dfs = [&](int root, int cur) {
      for (int nxt : adj[static_cast<std::size_t>(cur)]) {
        if (nxt == root && path.size() >= 6) {
          if (path[1] < path.back()) ++out[static_cast<int>(path.size())];
          continue;
        }
        if (nxt <= root || on_path[static_cast<std::size_t>(nxt)]) continue;
        if (static_cast<int>(path.size()) >= max_cycle_nodes) continue;
        on_path[static_cast<std::size_t>(nxt)] = 1;
        path.push_back(nxt);
        dfs(root, nxt);
        path.pop_back();
        on_path[static_cast<std::size_t>(nxt)] = 0;
      }
    };
    for (int s = 0; s < g.n_nodes(); ++s) {
      on_path[static_cast<std::size_t>(s)] = 1;
      path = {s};
      dfs(s, s);
      on_path[static_cast<std::size_t>(s)] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// the excess-1 catalogue

namespace census_detail {

struct Builder {
  int nv = 0, ne = 0;
  std::vector<std::pair<int, int>> inc;
  int add(Side s) { return s == Side::V ? nv++ : ne++; }
  void link(int a_id_v, int b_id_e) { inc.push_back({a_id_v, b_id_e}); }
  // connect two existing nodes by an alternating path with `len` ∈-edges;
  // sides must satisfy the parity (len even ⟺ same side)
  void path(Side sa, int a, Side sb, int b, int len) {
    Side cur_side = sa;
    int cur = a;
    for (int step = 0; step < len - 1; ++step) {
      Side nxt_side = other(cur_side);
      int nxt = add(nxt_side);
      cur_side == Side::V ? link(cur, nxt) : link(nxt, cur);
      cur_side = nxt_side;
      cur = nxt;
    }
    cur_side == Side::V ? link(cur, b) : link(b, cur);
  }
  IncidenceGraph build() const {
    IncidenceGraph g(nv, ne);
    for (auto [v, e] : inc) g.add_incidence(v, e);
    return g;
  }
};

}  // namespace census_detail

// All connected bipartite patterns of excess 1 with minimum degree 2 and at
// most max_nodes nodes, up to isomorphism. Three families cover them: theta
// (two branch nodes joined by three internally disjoint paths), figure-eight
// (two cycles sharing one node), and dumbbell (two disjoint cycles joined by
// a path). Length-2 cycles are parallel incidence pairs.
inline std::vector<Pattern> excess_catalogue(int max_nodes) {
  if (max_nodes > 14) throw ConfigError("excess_catalogue: max_nodes must be <= 14");
  using census_detail::Builder;
  std::vector<Pattern> out;
  std::set<std::string> seen;
  auto emit = [&](Builder& b, const std::string& name) {
    IncidenceGraph g = b.build();
    if (g.n_nodes() > max_nodes) return;
    if (excess(g) != 1) throw PatternError("catalogue generator bug: " + name);
    std::string key = canonical_key(g);
    if (!seen.insert(key).second) return;
    out.push_back(make_pattern(std::move(g), name));
  };

  // theta(a <= b <= c): branch nodes joined by three disjoint paths; all
  // lengths odd (branch nodes on opposite sides) or all even (same side,
  // V and E variants)
  for (int a = 1; a + a + a <= max_nodes + 1; ++a)
    for (int b = a; a + b + b <= max_nodes + 1; ++b)
      for (int c = b; a + b + c <= max_nodes + 1; ++c) {
        if ((a % 2) != (b % 2) || (b % 2) != (c % 2)) continue;
        if (a % 2 == 1) {
          Builder bb;
          int u = bb.add(Side::V), w = bb.add(Side::E);
          bb.path(Side::V, u, Side::E, w, a);
          bb.path(Side::V, u, Side::E, w, b);
          bb.path(Side::V, u, Side::E, w, c);
          emit(bb, "theta-" + std::to_string(a) + "-" + std::to_string(b) + "-" +
                       std::to_string(c));
        } else {
          for (Side s : {Side::V, Side::E}) {
            Builder bb;
            int u = bb.add(s), w = bb.add(s);
            bb.path(s, u, s, w, a);
            bb.path(s, u, s, w, b);
            bb.path(s, u, s, w, c);
            emit(bb, "theta-" + std::to_string(a) + "-" + std::to_string(b) + "-" +
                         std::to_string(c) + (s == Side::V ? "-V" : "-E"));
          }
        }
      }

  // figure-eight(2a <= 2b): two even cycles sharing one centre node
  for (int ca = 2; 2 * ca - 1 <= max_nodes; ca += 2)
    for (int cb = ca; ca + cb - 1 <= max_nodes; cb += 2)
      for (Side s : {Side::V, Side::E}) {
        Builder bb;
        int centre = bb.add(s);
        bb.path(s, centre, s, centre, ca);
        bb.path(s, centre, s, centre, cb);
        emit(bb, "fig8-" + std::to_string(ca) + "-" + std::to_string(cb) +
                     (s == Side::V ? "-V" : "-E"));
      }

  // dumbbell(2a, 2b, c): two disjoint even cycles joined by a path of length
  // c >= 1 between one node of each; attachment sides must satisfy parity
  for (int ca = 2; 2 * ca <= max_nodes; ca += 2)
    for (int cb = ca; ca + cb <= max_nodes; cb += 2)
      for (int c = 1; ca + cb + c - 1 <= max_nodes; ++c)
        for (Side sa : {Side::V, Side::E})
          for (Side sb : {Side::V, Side::E}) {
            bool same = sa == sb;
            if ((c % 2 == 0) != same) continue;
            Builder bb;
            int x = bb.add(sa), y = bb.add(sb);
            bb.path(sa, x, sa, x, ca);
            bb.path(sb, y, sb, y, cb);
            bb.path(sa, x, sb, y, c);
            emit(bb, "dumbbell-" + std::to_string(ca) + "-" + std::to_string(cb) + "-" +
                         std::to_string(c) + "-" + (sa == Side::V ? "V" : "E") +
                         (sb == Side::V ? "V" : "E"));
          }

  std::sort(out.begin(), out.end(), [](const Pattern& a, const Pattern& b) {
    if (a.graph.n_nodes() != b.graph.n_nodes()) return a.graph.n_nodes() < b.graph.n_nodes();
    return a.name < b.name;
  });
  return out;
}

}  // namespace hmg
