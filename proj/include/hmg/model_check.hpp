#pragma once

// Limit-theory toolkit on top of the formula core: support-pair specs and the
// contiguity criterion, the three axiom families of the almost-sure theory
// (degree exclusions, small-dense-set exclusions, tree-component floors),
// subclass membership sentences, Poisson predictions for unicyclic events
// (optionally with exact-degree decorations), an automatic distinguishing
// sentence for differing distribution pairs, and Monte Carlo estimation of
// limiting probabilities.
//
// Builder-produced sentences carry a semantic tag so evaluation can run a
// direct combinatorial check instead of the generic quantifier loop; the two
// agree exactly (property-tested), the tag is just speed. FO sees ∈ as a
// relation, so every fast check works on the deduplicated incidence relation:
// parallel ∈-edges are invisible, a member-less edge node satisfies v(x).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hmg/canonical.hpp"
#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"
#include "hmg/formula.hpp"
#include "hmg/incidence.hpp"
#include "hmg/pattern.hpp"
#include "hmg/sampler.hpp"

namespace hmg {

// --- support-pair spec and contiguity ---------------------------------------

struct LimitTheorySpec {
  SupportSet supp_v, supp_e;
};

inline LimitTheorySpec limit_theory_spec(const LimitDistribution& vdist,
                                         const LimitDistribution& edist) {
  LimitTheorySpec spec{vdist.support_set(), edist.support_set()};
  if (spec.supp_e.contains(0) || spec.supp_e.contains(1))
    throw ConfigError("edge-size support must not contain values below 2");
  return spec;
}

// The limit theories coincide exactly when the support pairs do, so two
// admissible sequences are first-order contiguous iff their specs are equal.
inline bool contiguous(const LimitTheorySpec& a, const LimitTheorySpec& b) {
  return a.supp_v == b.supp_v && a.supp_e == b.supp_e;
}

// --- tagged sentences --------------------------------------------------------

struct SentenceTag {
  enum class Kind {
    AllEdgesSizeTwo,        // every edge has exactly two distinct members
    SimpleGraph,            // size two everywhere and no two edges share a vertex pair
    NoDuplicateHyperedges,  // no two distinct edges with the same member set
    NoVertexOfDegree,       // no vertex with exactly `degree` distinct edges
    NoEdgeOfSize,           // no edge with exactly `degree` distinct members
    NoDenseSubset,          // no r vertices + s edges spanning r+s+1 memberships
    TreeCopies,             // at least `copies` components exactly realising `tree`
    FourCycle,              // two vertices sharing two edges, optional exact decorations
  };
  Kind kind;
  long long degree = 0;
  int r = 0, s = 0;
  long long copies = 0;
  IncidenceGraph tree;
  std::string tree_key;
  std::optional<long long> deg_u, deg_w, size_e, size_f;
};

struct Sentence {
  std::string name;
  FormulaPtr formula;
  std::optional<SentenceTag> tag;
};

// --- sentence builders -------------------------------------------------------

// ∀x. e(x) → |x| = 2 : the multigraph class (every hyper-edge is binary)
inline Sentence sentence_all_edges_size_two() {
  Sentence s;
  s.name = "all-edges-size-two";
  s.formula = f_forall("x", f_implies(f_is_edge("x"), f_size("x", 2)));
  s.tag = SentenceTag{SentenceTag::Kind::AllEdgesSizeTwo};
  return s;
}

// multigraph class and no two distinct edges on the same two distinct
// vertices (the u ≠ w conjunct is essential: without it the second clause
// would outlaw any two edges sharing a single vertex)
inline Sentence sentence_simple_graph() {
  FormulaPtr multi = f_not(f_exists(
      "e1", f_exists("e2", f_exists("u", f_exists("w", f_and({
                                                        f_not(f_eq("e1", "e2")),
                                                        f_not(f_eq("u", "w")),
                                                        f_in("u", "e1"),
                                                        f_in("w", "e1"),
                                                        f_in("u", "e2"),
                                                        f_in("w", "e2"),
                                                    }))))));
  Sentence s;
  s.name = "simple-graph";
  s.formula = f_and({sentence_all_edges_size_two().formula, multi});
  s.tag = SentenceTag{SentenceTag::Kind::SimpleGraph};
  return s;
}

// no two distinct edge nodes with identical member sets (the e() guards are
// essential: two distinct vertex nodes have equal — empty — member sets)
inline Sentence sentence_no_duplicate_hyperedges() {
  FormulaPtr same_members = f_forall("u", f_iff(f_in("u", "e1"), f_in("u", "e2")));
  Sentence s;
  s.name = "no-duplicate-hyperedges";
  s.formula = f_not(f_exists(
      "e1", f_exists("e2", f_and({f_is_edge("e1"), f_is_edge("e2"), f_not(f_eq("e1", "e2")),
                                  same_members}))));
  s.tag = SentenceTag{SentenceTag::Kind::NoDuplicateHyperedges};
  return s;
}

inline Sentence axiom_no_vertex_of_degree(long long k) {
  if (k < 0) throw ConfigError("degree must be >= 0");
  Sentence s;
  s.name = "no-vertex-of-degree-" + std::to_string(k);
  s.formula = f_not(f_exists("x", f_and({f_is_vertex("x"), f_degree("x", k)})));
  SentenceTag tag{SentenceTag::Kind::NoVertexOfDegree};
  tag.degree = k;
  s.tag = tag;
  return s;
}

inline Sentence axiom_no_edge_of_size(long long k) {
  if (k < 0) throw ConfigError("size must be >= 0");
  Sentence s;
  s.name = "no-edge-of-size-" + std::to_string(k);
  s.formula = f_not(f_exists("x", f_and({f_is_edge("x"), f_size("x", k)})));
  SentenceTag tag{SentenceTag::Kind::NoEdgeOfSize};
  tag.degree = k;
  s.tag = tag;
  return s;
}

// "for every set of r vertices and s edges there are not r+s+1 memberships":
// the literal formula quantifies r+s pairwise-distinct guarded nodes and
// rejects every (r+s+1)-subset of the r·s possible membership atoms. The
// instance is vacuously true when r·s < r+s+1.
inline Sentence axiom_no_dense_subset(int r, int s) {
  if (r < 0 || s < 0) throw ConfigError("dense-subset bounds must be >= 0");
  if (r > 4 || s > 4)
    throw ConfigError("dense-subset axiom supported up to 4 vertices / 4 edges");
  std::vector<std::string> us, fs;
  for (int i = 0; i < r; ++i) us.push_back("u" + std::to_string(i));
  for (int j = 0; j < s; ++j) fs.push_back("f" + std::to_string(j));

  std::vector<std::pair<int, int>> atoms;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < s; ++j) atoms.emplace_back(i, j);
  const long long need = r + s + 1;
  std::vector<FormulaPtr> dense_cases;
  std::vector<int> pick;
  // all (r+s+1)-subsets of the membership atoms
  std::function<void(std::size_t)> choose = [&](std::size_t next) {
    if (static_cast<long long>(pick.size()) == need) {
      std::vector<FormulaPtr> conj;
      for (int a : pick) conj.push_back(f_in(us[atoms[a].first], fs[atoms[a].second]));
      dense_cases.push_back(f_and(std::move(conj)));
      return;
    }
    if (next >= atoms.size()) return;
    if (atoms.size() - next < need - pick.size()) return;
    pick.push_back(static_cast<int>(next));
    choose(next + 1);
    pick.pop_back();
    choose(next + 1);
  };
  choose(0);

  std::vector<FormulaPtr> body;
  for (const std::string& u : us) body.push_back(f_is_vertex(u));
  for (const std::string& f : fs) body.push_back(f_is_edge(f));
  body.push_back(logic_detail::all_distinct(us));
  body.push_back(logic_detail::all_distinct(fs));
  body.push_back(f_or(std::move(dense_cases)));
  FormulaPtr inner = f_and(std::move(body));
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) inner = f_exists(*it, std::move(inner));
  for (auto it = us.rbegin(); it != us.rend(); ++it) inner = f_exists(*it, std::move(inner));

  Sentence out;
  out.name = "no-dense-subset-" + std::to_string(r) + "-" + std::to_string(s);
  out.formula = f_not(std::move(inner));
  SentenceTag tag{SentenceTag::Kind::NoDenseSubset};
  tag.r = r;
  tag.s = s;
  out.tag = tag;
  return out;
}

// "at least m pairwise-disjoint exact realisations of the tree": every tree
// node is quantified per copy, memberships asserted, and every node's degree
// pinned exactly, which forces each copy to be a full connected component.
inline Sentence axiom_tree_copies(const IncidenceGraph& tree, long long m) {
  if (m < 1) throw ConfigError("tree-copies count must be >= 1");
  if (tree.n_v() == 0) throw ConfigError("tree-copies needs at least one vertex");
  if (!canon_detail::is_connected(tree) || excess(tree) != -1)
    throw ConfigError("tree-copies pattern must be a connected tree");
  std::vector<std::string> all_vars;
  std::vector<FormulaPtr> body;
  for (long long copy = 0; copy < m; ++copy) {
    auto var = [&](int unified) {
      return "c" + std::to_string(copy) + "n" + std::to_string(unified);
    };
    for (int v = 0; v < tree.n_v(); ++v) {
      long long d = static_cast<long long>(tree.edges_of(v).size());
      if (d == 0) body.push_back(f_is_vertex(var(v)));
      body.push_back(f_degree(var(v), d));
    }
    for (int e = 0; e < tree.n_e(); ++e)
      body.push_back(f_size(var(tree.n_v() + e),
                            static_cast<long long>(tree.members_of(e).size())));
    for (int v = 0; v < tree.n_v(); ++v)
      for (int e : tree.edges_of(v)) body.push_back(f_in(var(v), var(tree.n_v() + e)));
    for (int id = 0; id < tree.n_nodes(); ++id) all_vars.push_back(var(id));
  }
  body.push_back(logic_detail::all_distinct(all_vars));
  FormulaPtr inner = f_and(std::move(body));
  for (auto it = all_vars.rbegin(); it != all_vars.rend(); ++it)
    inner = f_exists(*it, std::move(inner));

  Sentence s;
  s.name = "tree-copies-x" + std::to_string(m);
  s.formula = std::move(inner);
  SentenceTag tag{SentenceTag::Kind::TreeCopies};
  tag.copies = m;
  tag.tree = tree;
  tag.tree_key = canonical_key(tree);
  s.tag = tag;
  return s;
}

// ∃ u ≠ w, e ≠ f with u,w ∈ e and u,w ∈ f — a quadrilateral in the incidence
// relation — with optional exact decorations deg(u), deg(w), |e|, |f|.
inline Sentence sentence_four_cycle(std::optional<long long> deg_u = std::nullopt,
                                    std::optional<long long> deg_w = std::nullopt,
                                    std::optional<long long> size_e = std::nullopt,
                                    std::optional<long long> size_f = std::nullopt) {
  std::vector<FormulaPtr> body = {
      f_not(f_eq("u", "w")), f_not(f_eq("e", "f")), f_in("u", "e"),
      f_in("u", "f"),        f_in("w", "e"),        f_in("w", "f"),
  };
  std::string name = "four-cycle";
  if (deg_u) {
    body.push_back(f_degree("u", *deg_u));
    name += "-degu" + std::to_string(*deg_u);
  }
  if (deg_w) {
    body.push_back(f_degree("w", *deg_w));
    name += "-degw" + std::to_string(*deg_w);
  }
  if (size_e) {
    body.push_back(f_size("e", *size_e));
    name += "-size" + std::to_string(*size_e);
  }
  if (size_f) {
    body.push_back(f_size("f", *size_f));
    name += "-sizf" + std::to_string(*size_f);
  }
  Sentence s;
  s.name = name;
  s.formula = f_exists(
      "u", f_exists("w", f_exists("e", f_exists("f", f_and(std::move(body))))));
  SentenceTag tag{SentenceTag::Kind::FourCycle};
  tag.deg_u = deg_u;
  tag.deg_w = deg_w;
  tag.size_e = size_e;
  tag.size_f = size_f;
  s.tag = tag;
  return s;
}

// --- fast checkers (exact, relation semantics) -------------------------------

namespace theory_detail {

struct RelationView {
  std::vector<std::vector<int>> edges_of;    // per vertex: distinct edges, sorted
  std::vector<std::vector<int>> members_of;  // per edge: distinct members, sorted

  explicit RelationView(const IncidenceGraph& g)
      : edges_of(g.n_v()), members_of(g.n_e()) {
    for (int v = 0; v < g.n_v(); ++v) {
      edges_of[v] = g.edges_of(v);
      std::sort(edges_of[v].begin(), edges_of[v].end());
      edges_of[v].erase(std::unique(edges_of[v].begin(), edges_of[v].end()), edges_of[v].end());
    }
    for (int e = 0; e < g.n_e(); ++e) {
      members_of[e] = g.sorted_members(e);
      members_of[e].erase(std::unique(members_of[e].begin(), members_of[e].end()),
                          members_of[e].end());
    }
  }
};

inline bool check_all_edges_size_two(const RelationView& r) {
  for (const auto& mem : r.members_of)
    if (!mem.empty() && mem.size() != 2) return false;
  return true;
}

// vertex pairs sharing >= 2 distinct edges, i.e. relation quadrilaterals
inline std::map<std::pair<int, int>, std::vector<int>> quad_bases(const RelationView& r) {
  std::map<std::pair<int, int>, std::vector<int>> bases;
  std::map<std::pair<int, int>, std::vector<int>> all;
  for (int e = 0; e < static_cast<int>(r.members_of.size()); ++e) {
    const auto& mem = r.members_of[e];
    for (std::size_t i = 0; i < mem.size(); ++i)
      for (std::size_t j = i + 1; j < mem.size(); ++j) all[{mem[i], mem[j]}].push_back(e);
  }
  for (auto& [pair, es] : all)
    if (es.size() >= 2) bases.emplace(pair, std::move(es));
  return bases;
}

inline bool check_simple_graph(const RelationView& r) {
  return check_all_edges_size_two(r) && quad_bases(r).empty();
}

inline bool check_no_duplicate_hyperedges(const RelationView& r) {
  std::vector<std::vector<int>> sets;
  for (const auto& mem : r.members_of)
    if (!mem.empty()) sets.push_back(mem);
  std::sort(sets.begin(), sets.end());
  return std::adjacent_find(sets.begin(), sets.end()) == sets.end();
}

inline bool check_no_vertex_of_degree(const RelationView& r, long long k) {
  for (const auto& es : r.edges_of)
    if (static_cast<long long>(es.size()) == k) return false;
  if (k == 0)  // a member-less edge node satisfies v(x) and has degree 0
    for (const auto& mem : r.members_of)
      if (mem.empty()) return false;
  return true;
}

inline bool check_no_edge_of_size(const RelationView& r, long long k) {
  if (k == 0) return true;  // e(x) demands a member, so size 0 cannot occur
  for (const auto& mem : r.members_of)
    if (static_cast<long long>(mem.size()) == k) return false;
  return true;
}

// connected components of the deduplicated relation, each as its own graph
struct RelationComponent {
  IncidenceGraph graph;
  int extra_isolated_vertices = 0;  // unused; components are listed one by one
};

inline long long count_tree_components(const IncidenceGraph& g, const RelationView& r,
                                       const SentenceTag& tag, long long stop_at) {
  // the single-vertex tree is matched by isolated vertices and, because v(x)
  // is "nothing is a member of x", by member-less edge nodes as well
  if (tag.tree.n_nodes() == 1 && tag.tree.n_v() == 1) {
    long long count = 0;
    for (const auto& es : r.edges_of)
      if (es.empty() && ++count >= stop_at) return count;
    for (const auto& mem : r.members_of)
      if (mem.empty() && ++count >= stop_at) return count;
    return count;
  }
  const int nv = g.n_v();
  std::vector<char> seen(g.n_nodes(), 0);
  long long count = 0;
  for (int start = 0; start < g.n_nodes(); ++start) {
    if (seen[start]) continue;
    std::vector<int> stack{start}, vs, es;
    seen[start] = 1;
    bool oversized = false;
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      (id < nv ? vs : es).push_back(id);
      if (static_cast<int>(vs.size()) > tag.tree.n_v() ||
          static_cast<int>(es.size()) > tag.tree.n_e())
        oversized = true;
      const std::vector<int>& nbr = id < nv ? r.edges_of[id] : r.members_of[id - nv];
      for (int o : nbr) {
        int oid = id < nv ? nv + o : o;
        if (!seen[oid]) {
          seen[oid] = 1;
          stack.push_back(oid);
        }
      }
    }
    if (oversized || static_cast<int>(vs.size()) != tag.tree.n_v() ||
        static_cast<int>(es.size()) != tag.tree.n_e())
      continue;
    std::sort(vs.begin(), vs.end());
    std::sort(es.begin(), es.end());
    IncidenceGraph comp(static_cast<int>(vs.size()), static_cast<int>(es.size()));
    for (std::size_t j = 0; j < es.size(); ++j)
      for (int v : r.members_of[es[j] - nv]) {
        auto it = std::lower_bound(vs.begin(), vs.end(), v);
        comp.add_incidence(static_cast<int>(it - vs.begin()), static_cast<int>(j));
      }
    if (canonical_key(comp) == tag.tree_key && ++count >= stop_at) return count;
  }
  return count;
}

// Exact decision of "do exactly r vertex-like nodes and s edge nodes span at
// least r+s+1 membership pairs" for r, s <= 4. Small graphs exhaust the edge
// subsets. Large graphs use structure: a violating set keeps >= r+s+1 pairs
// on <= r+s nodes, so stripping internal-degree-<=1 nodes (which never lowers
// pairs minus nodes) leaves a connected min-degree-2 core with more pairs
// than nodes on at most 8 nodes. A simple bipartite graph like that has girth
// 4 or 6 (an 8-cycle plus a chord always closes something shorter), so every
// violating set contains a relation quadrilateral or hexagon. We grow
// candidate sets from each such seed by adjacency; the slots not reachable by
// adjacency belong to components disjoint from the grown part, whose exact
// best contribution for the <= (2,2) leftover sizes is computed directly.
inline bool dense_subset_exists(const IncidenceGraph& g, const RelationView& r, int rr, int ss) {
  const long long need = static_cast<long long>(rr) + ss + 1;
  if (static_cast<long long>(rr) * ss < need) return false;

  std::vector<int> live_edges;  // nodes satisfying e(x)
  int empty_edges = 0;
  for (int e = 0; e < g.n_e(); ++e) {
    if (r.members_of[e].empty())
      ++empty_edges;
    else
      live_edges.push_back(e);
  }
  const long long vertex_slots = g.n_v() + empty_edges;  // v(x) nodes
  if (vertex_slots < rr || static_cast<long long>(live_edges.size()) < ss) return false;

  // small graphs: exhaust the edge subsets; the best vertex choice for a given
  // edge set is the top coverage counts (member-less "vertices" contribute 0)
  if (g.n_e() <= 40) {
    std::vector<int> cover(g.n_v(), 0);
    std::vector<int> chosen;
    bool found = false;
    std::function<void(std::size_t)> rec = [&](std::size_t next) {
      if (found) return;
      if (static_cast<int>(chosen.size()) == ss) {
        std::vector<int> touched;
        for (int c : cover)
          if (c > 0) touched.push_back(c);
        std::sort(touched.begin(), touched.end(), std::greater<int>());
        long long pairs = 0;
        std::size_t take = std::min<std::size_t>(rr, touched.size());
        for (std::size_t i = 0; i < take; ++i) pairs += touched[i];
        if (pairs >= need) found = true;
        return;
      }
      if (next >= live_edges.size()) return;
      if (live_edges.size() - next < static_cast<std::size_t>(ss) - chosen.size()) return;
      int e = live_edges[next];
      chosen.push_back(e);
      for (int v : r.members_of[e]) ++cover[v];
      rec(next + 1);
      for (int v : r.members_of[e]) --cover[v];
      chosen.pop_back();
      rec(next + 1);
    };
    rec(0);
    return found;
  }

  auto bases = quad_bases(r);

  const int nv = g.n_v();
  int max_deg = 0, max_size = 0;
  for (const auto& es : r.edges_of) max_deg = std::max(max_deg, static_cast<int>(es.size()));
  for (const auto& mem : r.members_of)
    max_size = std::max(max_size, static_cast<int>(mem.size()));
  const long long cap_v = std::min<long long>(max_deg, ss);
  const long long cap_e = std::min<long long>(max_size, rr);

  std::set<std::pair<std::vector<int>, std::vector<int>>> visited;
  bool found = false;

  auto exact_pairs = [&](const std::vector<int>& R, const std::vector<int>& S) {
    long long pairs = 0;
    for (int e : S)
      for (int v : r.members_of[e])
        if (std::binary_search(R.begin(), R.end(), v)) ++pairs;
    return pairs;
  };

  std::function<void(std::vector<int>&, std::vector<int>&, long long)> grow =
      [&](std::vector<int>& R, std::vector<int>& S, long long pairs) {
        if (found) return;
        if (!visited.insert({R, S}).second) return;
        if (static_cast<int>(R.size()) == rr && static_cast<int>(S.size()) == ss &&
            pairs >= need) {
          found = true;
          return;
        }
        long long head = pairs + (rr - static_cast<long long>(R.size())) * cap_v +
                         (ss - static_cast<long long>(S.size())) * cap_e;
        if (head < need) return;  // even the optimistic completion falls short
        if (static_cast<int>(S.size()) < ss) {
          std::set<int> cand;
          for (int v : R)
            for (int e : r.edges_of[v]) cand.insert(e);
          for (int e : cand) {
            if (found) return;
            if (std::binary_search(S.begin(), S.end(), e)) continue;
            long long gain = 0;
            for (int v : r.members_of[e])
              if (std::binary_search(R.begin(), R.end(), v)) ++gain;
            std::vector<int> S2 = S;
            S2.insert(std::upper_bound(S2.begin(), S2.end(), e), e);
            grow(R, S2, pairs + gain);
          }
        }
        if (static_cast<int>(R.size()) < rr) {
          std::set<int> cand;
          for (int e : S)
            for (int v : r.members_of[e]) cand.insert(v);
          for (int v : cand) {
            if (found) return;
            if (std::binary_search(R.begin(), R.end(), v)) continue;
            long long gain = 0;
            for (int e : r.edges_of[v])
              if (std::binary_search(S.begin(), S.end(), e)) ++gain;
            std::vector<int> R2 = R;
            R2.insert(std::upper_bound(R2.begin(), R2.end(), v), v);
            grow(R2, S, pairs + gain);
          }
        }
      };

  auto seed = [&](std::vector<int> R, std::vector<int> S) {
    std::sort(R.begin(), R.end());
    std::sort(S.begin(), S.end());
    grow(R, S, exact_pairs(R, S));
  };

  for (const auto& [pair, witnesses] : bases) {
    for (std::size_t i = 0; i < witnesses.size() && !found; ++i)
      for (std::size_t j = i + 1; j < witnesses.size() && !found; ++j)
        seed({pair.first, pair.second}, {witnesses[i], witnesses[j]});
  }

  // relation hexagons v1-e1-v2-e2-v3-e3-v1 (girth-6 cores have no quads)
  if (!found && rr >= 3 && ss >= 3) {
    for (int v1 = 0; v1 < nv && !found; ++v1) {
      const auto& es = r.edges_of[v1];
      for (std::size_t i = 0; i < es.size() && !found; ++i)
        for (std::size_t j = i + 1; j < es.size() && !found; ++j)
          for (int v2 : r.members_of[es[i]]) {
            if (v2 == v1) continue;
            for (int v3 : r.members_of[es[j]]) {
              if (v3 == v1 || v3 == v2) continue;
              for (int e2 : r.edges_of[v2]) {
                if (e2 == es[i] || e2 == es[j]) continue;
                if (!std::binary_search(r.edges_of[v3].begin(), r.edges_of[v3].end(), e2))
                  continue;
                seed({v1, v2, v3}, {es[i], es[j], e2});
                if (found) break;
              }
              if (found) break;
            }
            if (found) break;
          }
    }
  }
  if (found) return true;
  if (visited.empty()) return false;

  // Exact best pair count of a completion disjoint from (R, S) using exactly
  // (a, b) extra nodes, needed only for a, b <= 2: a quadrilateral gives 4, a
  // two-edge path 3, a cherry / fat edge / two separate memberships 2, one
  // membership 1. Leftover slots beyond that carry zero pairs.
  auto disjoint_bonus = [&](int a, int b, const std::vector<int>& R,
                            const std::vector<int>& S) -> long long {
    if (a <= 0 || b <= 0) return 0;
    auto v_free = [&](int v) { return !std::binary_search(R.begin(), R.end(), v); };
    auto e_clear = [&](int e) {
      if (std::binary_search(S.begin(), S.end(), e)) return false;
      for (int v : r.members_of[e])
        if (!v_free(v)) return false;
      return true;
    };
    if (a >= 2 && b >= 2)
      for (const auto& [p, ws] : bases) {
        if (!v_free(p.first) || !v_free(p.second)) continue;
        int clear = 0;
        for (int e : ws)
          if (e_clear(e) && ++clear >= 2) return 4;
      }
    long long bonus = 0;
    const long long limit = std::min(a, 2) + std::min(b, 2);  // path of 3 needs (2,2)
    if (b >= 2) {  // a vertex in two clear edges; with a fat one and a >= 2, a path
      for (int v = 0; v < nv && bonus < std::min(limit, 3LL); ++v) {
        if (!v_free(v)) continue;
        int clear = 0;
        bool fat = false;
        for (int e : r.edges_of[v])
          if (e_clear(e)) {
            ++clear;
            if (r.members_of[e].size() >= 2) fat = true;
          }
        if (clear >= 2) bonus = std::max(bonus, a >= 2 && fat ? 3LL : 2LL);
      }
    }
    if (a >= 2 && bonus < 2) {  // one clear edge with two members
      for (int e : live_edges)
        if (e_clear(e) && r.members_of[e].size() >= 2) {
          bonus = 2;
          break;
        }
    }
    if (a >= 2 && b >= 2 && bonus < 2) {  // two separate clear memberships
      int first = -1, first_member = -1;
      for (int e : live_edges) {
        if (!e_clear(e)) continue;
        if (first < 0) {
          first = e;
          first_member = r.members_of[e][0];
        } else {
          for (int v : r.members_of[e])
            if (v != first_member) {
              bonus = 2;
              break;
            }
          // both edges pend on the same single vertex: keep looking
          if (bonus == 2) break;
        }
      }
    }
    if (bonus == 0) {  // a single clear membership
      for (int e : live_edges)
        if (e_clear(e)) {
          bonus = 1;
          break;
        }
    }
    return bonus;
  };

  for (const auto& [R, S] : visited) {
    int a = static_cast<int>(R.size()), b = static_cast<int>(S.size());
    long long pairs = exact_pairs(R, S);
    long long slack = need - pairs;
    if (slack <= 0) return true;  // only reachable with fillers to (rr, ss)
    if (slack > std::min(rr - a, 2) + std::min(ss - b, 2)) continue;
    if (pairs + disjoint_bonus(rr - a, ss - b, R, S) >= need) return true;
  }
  return false;
}

inline bool check_four_cycle(const RelationView& r, const SentenceTag& tag) {
  for (const auto& [pair, ws] : quad_bases(r)) {
    auto deg = [&](int v) { return static_cast<long long>(r.edges_of[v].size()); };
    auto size = [&](int e) { return static_cast<long long>(r.members_of[e].size()); };
    bool vertex_ok = false;
    for (int swap = 0; swap < 2 && !vertex_ok; ++swap) {
      int u = swap ? pair.second : pair.first;
      int w = swap ? pair.first : pair.second;
      vertex_ok = (!tag.deg_u || deg(u) == *tag.deg_u) && (!tag.deg_w || deg(w) == *tag.deg_w);
    }
    if (!vertex_ok) continue;
    for (std::size_t i = 0; i < ws.size(); ++i)
      for (std::size_t j = 0; j < ws.size(); ++j) {
        if (i == j) continue;
        if ((!tag.size_e || size(ws[i]) == *tag.size_e) &&
            (!tag.size_f || size(ws[j]) == *tag.size_f))
          return true;
      }
  }
  return false;
}

}  // namespace theory_detail

// Tagged evaluation: run the direct combinatorial check when the sentence
// carries a tag, otherwise the generic quantifier evaluator.
inline bool evaluate(const Sentence& s, const IncidenceGraph& g) {
  if (!s.tag) return evaluate(s.formula, g);
  theory_detail::RelationView view(g);
  using K = SentenceTag::Kind;
  switch (s.tag->kind) {
    case K::AllEdgesSizeTwo: return theory_detail::check_all_edges_size_two(view);
    case K::SimpleGraph: return theory_detail::check_simple_graph(view);
    case K::NoDuplicateHyperedges: return theory_detail::check_no_duplicate_hyperedges(view);
    case K::NoVertexOfDegree:
      return theory_detail::check_no_vertex_of_degree(view, s.tag->degree);
    case K::NoEdgeOfSize: return theory_detail::check_no_edge_of_size(view, s.tag->degree);
    case K::NoDenseSubset:
      return !theory_detail::dense_subset_exists(g, view, s.tag->r, s.tag->s);
    case K::TreeCopies:
      return theory_detail::count_tree_components(g, view, *s.tag, s.tag->copies) >=
             s.tag->copies;
    case K::FourCycle: return theory_detail::check_four_cycle(view, *s.tag);
  }
  throw FormulaError("evaluate: unknown sentence tag");
}

// --- axiom instantiation -----------------------------------------------------

struct AxiomBounds {
  int dense_max_r = 3, dense_max_s = 3;       // dense-subset instances for all r,s up to these
  long long excluded_degree_bound = 6;        // degree/size exclusions up to this value
  std::vector<IncidenceGraph> trees;          // tree-component floors for these shapes
  long long tree_copies_bound = 2;            // ... for every count 1..bound
};

// The concrete axioms of the almost-sure theory determined by the support
// pair: degree exclusions outside the supports, dense-set exclusions, and
// tree floors for realisable trees. A supplied tree outside the theory
// (some node degree off-support) is an error.
inline std::vector<Sentence> limit_theory_axioms(const LimitTheorySpec& spec,
                                                 const AxiomBounds& bounds) {
  std::vector<Sentence> out;
  for (long long k = 0; k <= bounds.excluded_degree_bound; ++k)
    if (!spec.supp_v.contains(static_cast<int>(k))) out.push_back(axiom_no_vertex_of_degree(k));
  for (long long k = 2; k <= bounds.excluded_degree_bound; ++k)
    if (!spec.supp_e.contains(static_cast<int>(k))) out.push_back(axiom_no_edge_of_size(k));
  for (int r = 0; r <= bounds.dense_max_r; ++r)
    for (int s = 0; s <= bounds.dense_max_s; ++s) out.push_back(axiom_no_dense_subset(r, s));
  for (std::size_t t = 0; t < bounds.trees.size(); ++t) {
    const IncidenceGraph& tree = bounds.trees[t];
    if (!canon_detail::is_connected(tree) || excess(tree) != -1)
      throw NotInTheoryError("tree axiom needs a connected tree");
    for (int v = 0; v < tree.n_v(); ++v)
      if (!spec.supp_v.contains(static_cast<int>(tree.edges_of(v).size())))
        throw NotInTheoryError("tree has a vertex of off-support degree " +
                               std::to_string(tree.edges_of(v).size()));
    for (int e = 0; e < tree.n_e(); ++e)
      if (!spec.supp_e.contains(static_cast<int>(tree.members_of(e).size())))
        throw NotInTheoryError("tree has an edge of off-support size " +
                               std::to_string(tree.members_of(e).size()));
    for (long long m = 1; m <= bounds.tree_copies_bound; ++m) {
      Sentence s = axiom_tree_copies(tree, m);
      s.name = "tree-" + std::to_string(t) + "-copies-" + std::to_string(m);
      out.push_back(std::move(s));
    }
  }
  return out;
}

// --- Poisson predictions for unicyclic events --------------------------------

struct Decoration {
  NodeRef node;
  long long exact_degree = 0;
};

struct PoissonPrediction {
  double lambda = 0.0;
  double p_at_least_one = 0.0;
};

// Limit of the expected number of realisations of a unicyclic pattern with
// the given exact-degree decorations: each decorated node contributes
// (k)_{deg_H} · mass(k) in place of the falling moment, and the automorphism
// divisor counts only decoration-preserving maps.
inline PoissonPrediction poisson_prediction(const Pattern& h,
                                            const std::vector<Decoration>& decorations,
                                            const LimitDistribution& vdist,
                                            const LimitDistribution& edist) {
  const IncidenceGraph& g = h.graph;
  if (excess(g) != 0)
    throw PatternError("poisson prediction needs a unicyclic (excess-0) pattern: " + h.name);
  std::vector<long long> colors(g.n_nodes(), -1);
  for (const Decoration& d : decorations) {
    int limit = d.node.side == Side::V ? g.n_v() : g.n_e();
    if (d.node.index < 0 || d.node.index >= limit)
      throw PatternError("decoration on a node outside the pattern");
    if (d.exact_degree < 0) throw PatternError("decoration degree must be >= 0");
    int id = g.id_of(d.node);
    if (colors[id] != -1) throw PatternError("two decorations on the same node");
    colors[id] = d.exact_degree;
  }

  auto falling = [](long long k, long long d) {
    double out = 1.0;
    for (long long t = 0; t < d; ++t) out *= static_cast<double>(k - t);
    return out < 0 ? 0.0 : out;
  };
  double num = 1.0;
  for (int v = 0; v < g.n_v(); ++v) {
    long long d = g.degree(NodeRef{Side::V, v});
    long long c = colors[v];
    num *= c >= 0 ? falling(c, d) * vdist.mass(static_cast<int>(c)) : vdist.falling_moment(d);
  }
  for (int e = 0; e < g.n_e(); ++e) {
    long long d = g.degree(NodeRef{Side::E, e});
    long long c = colors[g.n_v() + e];
    num *= c >= 0 ? falling(c, d) * edist.mass(static_cast<int>(c)) : edist.falling_moment(d);
  }

  PoissonPrediction out;
  if (num > 0) {
    long long divisor = census_detail::count_automorphisms(g, false, false, &colors);
    for (int v = 0; v < g.n_v(); ++v) {
      std::vector<int> es = g.edges_of(v);
      std::sort(es.begin(), es.end());
      for (std::size_t i = 0; i < es.size();) {
        std::size_t j = i;
        while (j < es.size() && es[j] == es[i]) ++j;
        for (std::size_t t = 2; t <= j - i; ++t) divisor *= static_cast<long long>(t);
        i = j;
      }
    }
    double den = static_cast<double>(divisor) *
                 std::pow(vdist.mean(), static_cast<double>(g.m() - g.n_e())) *
                 std::pow(edist.mean(), static_cast<double>(g.n_e()));
    out.lambda = num / den;
  }
  out.p_at_least_one = 1.0 - std::exp(-out.lambda);
  return out;
}

inline PoissonPrediction poisson_prediction(const Pattern& h, const LimitDistribution& vdist,
                                            const LimitDistribution& edist) {
  return poisson_prediction(h, {}, vdist, edist);
}

// --- distinguishing sentence -------------------------------------------------

namespace theory_detail {

inline Pattern quad_pattern() {
  IncidenceGraph g(2, 2);
  g.add_incidence(0, 0);
  g.add_incidence(0, 1);
  g.add_incidence(1, 0);
  g.add_incidence(1, 1);
  return make_pattern(std::move(g), "quadrilateral");
}

// degrees where the two masses differ, k in [lo, cap]
inline std::vector<long long> differing_masses(const LimitDistribution& a,
                                               const LimitDistribution& b, int lo) {
  std::vector<long long> out;
  for (int k = lo; k <= 64; ++k)
    if (std::abs(a.mass(k) - b.mass(k)) > 1e-15) out.push_back(k);
  return out;
}

inline int support_scan_limit(const SupportSet& a, const SupportSet& b) {
  int hi = 0;
  if (!a.degrees.empty()) hi = std::max(hi, *a.degrees.rbegin());
  if (!b.degrees.empty()) hi = std::max(hi, *b.degrees.rbegin());
  return hi + 1;
}

}  // namespace theory_detail

// A sentence whose limiting probabilities differ between the two admissible
// pairs, or nullopt when the pairs are equal. Differing supports yield a
// degree-exclusion axiom (limits 0 vs 1); equal supports with differing
// masses yield a quadrilateral sentence, decorated with exact degrees where
// needed, whose limits 1 − e^{−λ} differ. When no cycle can ever appear
// (no vertex degree >= 2 in the common support) every sentence has a 0/1
// limit shared by both pairs, so equal-support pairs return nullopt even if
// the masses differ.
inline std::optional<Sentence> distinguishing_formula(const LimitDistribution& vdist1,
                                                      const LimitDistribution& edist1,
                                                      const LimitDistribution& vdist2,
                                                      const LimitDistribution& edist2) {
  if (vdist1.to_json() == vdist2.to_json() && edist1.to_json() == edist2.to_json())
    return std::nullopt;

  LimitTheorySpec s1 = limit_theory_spec(vdist1, edist1);
  LimitTheorySpec s2 = limit_theory_spec(vdist2, edist2);
  if (!contiguous(s1, s2)) {
    int limit = theory_detail::support_scan_limit(s1.supp_v, s2.supp_v);
    for (int k = 0; k <= limit; ++k)
      if (s1.supp_v.contains(k) != s2.supp_v.contains(k)) return axiom_no_vertex_of_degree(k);
    limit = theory_detail::support_scan_limit(s1.supp_e, s2.supp_e);
    for (int k = 2; k <= limit; ++k)
      if (s1.supp_e.contains(k) != s2.supp_e.contains(k)) return axiom_no_edge_of_size(k);
    throw ConfigError("support pairs differ but no differing degree found");
  }

  if (vdist1.falling_moment(2) <= 0.0) return std::nullopt;  // cycles impossible

  Pattern quad = theory_detail::quad_pattern();
  auto differs = [&](const std::vector<Decoration>& dec,
                     const Sentence& sentence) -> std::optional<Sentence> {
    double p1 = poisson_prediction(quad, dec, vdist1, edist1).p_at_least_one;
    double p2 = poisson_prediction(quad, dec, vdist2, edist2).p_at_least_one;
    if (std::abs(p1 - p2) > 1e-9) return sentence;
    return std::nullopt;
  };
  const NodeRef u{Side::V, 0}, w{Side::V, 1}, e{Side::E, 0}, f{Side::E, 1};

  std::vector<long long> dv = theory_detail::differing_masses(vdist1, vdist2, 2);
  std::vector<long long> de = theory_detail::differing_masses(edist1, edist2, 2);
  for (long long i : dv)
    if (auto hit = differs({{u, i}}, sentence_four_cycle(i))) return hit;
  for (long long j : de)
    if (auto hit = differs({{e, j}}, sentence_four_cycle({}, {}, j))) return hit;
  if (auto hit = differs({}, sentence_four_cycle())) return hit;
  for (long long i : dv)
    for (long long j : de)
      if (auto hit = differs({{u, i}, {e, j}}, sentence_four_cycle(i, {}, j))) return hit;
  for (long long i : dv)
    for (long long i2 : dv)
      if (i <= i2)
        if (auto hit = differs({{u, i}, {w, i2}}, sentence_four_cycle(i, i2))) return hit;
  for (long long j : de)
    for (long long j2 : de)
      if (j <= j2)
        if (auto hit = differs({{e, j}, {f, j2}}, sentence_four_cycle({}, {}, j, j2)))
          return hit;
  return std::nullopt;
}

// --- Monte Carlo limiting probabilities ---------------------------------------

struct LimitingEstimate {
  long long n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

// Empirical satisfaction frequency of the sentence over sampled incidence
// graphs at each size, with per-(size, sample) substreams so batches are
// reproducible. The trend across sizes approximates the limiting probability.
inline std::vector<LimitingEstimate> estimate_limiting_probability(
    const Sentence& f, const LimitDistribution& vdist, const LimitDistribution& edist,
    const std::vector<long long>& n_list, long long samples_per_n, std::uint64_t seed,
    Conditioning conditioning = Conditioning::None) {
  if (samples_per_n < 1) throw ConfigError("estimate needs samples_per_n >= 1");
  std::vector<LimitingEstimate> out;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    SequencePair pair = pair_sequences_adjusted(vdist, edist, n_list[ni]);
    SampleOptions opts;
    opts.conditioning = conditioning;
    opts.seed = Rng::substream(seed, {static_cast<std::uint64_t>(ni)}).next();
    long long hits = 0;
    for (long long i = 0; i < samples_per_n; ++i)
      if (evaluate(f, sample_incidence(pair, opts, i).graph)) ++hits;
    LimitingEstimate est;
    est.n = n_list[ni];
    est.samples = samples_per_n;
    est.mean = static_cast<double>(hits) / static_cast<double>(samples_per_n);
    est.std_error =
        std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(samples_per_n));
    out.push_back(est);
  }
  return out;
}

}  // namespace hmg
