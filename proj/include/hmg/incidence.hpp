#pragma once

// Bipartite incidence graphs: vertex nodes on one side, hyper-edge nodes on
// the other, with a multiset of (v, e) incidences. This is the common
// representation for sampled configurations (which may have repeated
// incidences), hyper-multigraphs (simple incidences, e-degrees >= 2), and the
// small fragments used as patterns and neighbourhood balls.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmg/degree_sequence.hpp"
#include "hmg/errors.hpp"

namespace hmg {

enum class Side : std::uint8_t { V, E };

inline Side other(Side s) { return s == Side::V ? Side::E : Side::V; }

struct NodeRef {
  Side side = Side::V;
  int index = 0;
  bool operator==(const NodeRef&) const = default;
  auto operator<=>(const NodeRef&) const = default;
};

class IncidenceGraph {
 public:
  IncidenceGraph() = default;
  IncidenceGraph(int n_v, int n_e) : v_adj_(n_v), e_adj_(n_e) {}

  int n_v() const { return static_cast<int>(v_adj_.size()); }
  int n_e() const { return static_cast<int>(e_adj_.size()); }
  int n_nodes() const { return n_v() + n_e(); }
  long long m() const { return m_; }

  void add_incidence(int v, int e) {
    v_adj_.at(v).push_back(e);
    e_adj_.at(e).push_back(v);
    ++m_;
  }

  // adjacency with multiplicity (repeats appear as repeats)
  const std::vector<int>& edges_of(int v) const { return v_adj_[v]; }
  const std::vector<int>& members_of(int e) const { return e_adj_[e]; }

  int degree(NodeRef u) const {
    return u.side == Side::V ? static_cast<int>(v_adj_[u.index].size())
                             : static_cast<int>(e_adj_[u.index].size());
  }

  // unified node ids 0..n_v-1 (V) then n_v..n_v+n_e-1 (E)
  int id_of(NodeRef u) const { return u.side == Side::V ? u.index : n_v() + u.index; }
  NodeRef ref_of(int id) const {
    return id < n_v() ? NodeRef{Side::V, id} : NodeRef{Side::E, id - n_v()};
  }

  std::vector<NodeRef> neighbors(NodeRef u) const {  // with multiplicity
    std::vector<NodeRef> out;
    if (u.side == Side::V)
      for (int e : v_adj_[u.index]) out.push_back({Side::E, e});
    else
      for (int v : e_adj_[u.index]) out.push_back({Side::V, v});
    return out;
  }

  // multiplicity of a (v, e) pair
  int multiplicity(int v, int e) const {
    int c = 0;
    for (int x : v_adj_[v]) c += (x == e);
    return c;
  }

  bool simple_incidence() const {
    for (int e = 0; e < n_e(); ++e) {
      std::vector<int> mem = e_adj_[e];
      std::sort(mem.begin(), mem.end());
      if (std::adjacent_find(mem.begin(), mem.end()) != mem.end()) return false;
    }
    return true;
  }

  // sorted member list per e-node (with repeats if non-simple)
  std::vector<int> sorted_members(int e) const {
    std::vector<int> mem = e_adj_[e];
    std::sort(mem.begin(), mem.end());
    return mem;
  }

  // true when no two e-nodes carry the identical member multiset
  bool no_duplicate_hyperedges() const {
    std::vector<std::vector<int>> keys;
    keys.reserve(n_e());
    for (int e = 0; e < n_e(); ++e) keys.push_back(sorted_members(e));
    std::sort(keys.begin(), keys.end());
    return std::adjacent_find(keys.begin(), keys.end()) == keys.end();
  }

  // true when no two e-nodes carry the identical member *set* (multiplicity
  // blind, matching what the membership relation alone can express)
  bool no_duplicate_member_sets() const {
    std::vector<std::vector<int>> keys;
    keys.reserve(n_e());
    for (int e = 0; e < n_e(); ++e) {
      std::vector<int> mem = sorted_members(e);
      mem.erase(std::unique(mem.begin(), mem.end()), mem.end());
      keys.push_back(std::move(mem));
    }
    std::sort(keys.begin(), keys.end());
    return std::adjacent_find(keys.begin(), keys.end()) == keys.end();
  }

  // sorted multiset of incidences, the canonical serialization order
  std::vector<std::pair<int, int>> sorted_incidences() const {
    std::vector<std::pair<int, int>> inc;
    inc.reserve(static_cast<std::size_t>(m_));
    for (int v = 0; v < n_v(); ++v)
      for (int e : v_adj_[v]) inc.push_back({v, e});
    std::sort(inc.begin(), inc.end());
    return inc;
  }

  bool operator==(const IncidenceGraph& o) const {
    return n_v() == o.n_v() && n_e() == o.n_e() && sorted_incidences() == o.sorted_incidences();
  }

 private:
  std::vector<std::vector<int>> v_adj_;
  std::vector<std::vector<int>> e_adj_;
  long long m_ = 0;
};

// excess of a fragment: #incidences - #nodes. -1 for trees, 0 unicyclic.
inline long long excess(const IncidenceGraph& g) { return g.m() - g.n_nodes(); }

inline std::pair<DegreeSequence, DegreeSequence> degree_census(const IncidenceGraph& g) {
  DegreeSequence v, e;
  for (int i = 0; i < g.n_v(); ++i) ++v.counts[static_cast<int>(g.edges_of(i).size())];
  for (int i = 0; i < g.n_e(); ++i) ++e.counts[static_cast<int>(g.members_of(i).size())];
  return {v, e};
}

// ---------------------------------------------------------------------------
// hyper-multigraph view

struct HyperMultigraph {
  int n = 0;                                  // vertices 0..n-1
  std::map<std::vector<int>, long long> edges;  // sorted vertex set -> multiplicity

  long long edge_count() const {
    long long s = 0;
    for (auto& [mem, c] : edges) s += c;
    return s;
  }
};

// One e-node per multiplicity copy, ordered by (member set, copy index).
inline IncidenceGraph to_incidence(const HyperMultigraph& h) {
  long long ne = h.edge_count();
  IncidenceGraph g(h.n, static_cast<int>(ne));
  int e = 0;
  for (auto& [members, mult] : h.edges) {
    for (long long c = 0; c < mult; ++c, ++e)
      for (int v : members) g.add_incidence(v, e);
  }
  return g;
}

// Errors when g has a repeated (v, e) incidence or an e-node of size < 2:
// such graphs have no hyper-multigraph preimage.
inline HyperMultigraph from_incidence(const IncidenceGraph& g) {
  HyperMultigraph h;
  h.n = g.n_v();
  for (int e = 0; e < g.n_e(); ++e) {
    std::vector<int> mem = g.sorted_members(e);
    if (std::adjacent_find(mem.begin(), mem.end()) != mem.end())
      throw NotIncidenceSimpleError("e-node " + std::to_string(e) +
                                    " has a repeated incidence; not a hyper-multigraph");
    if (mem.size() < 2)
      throw NotIncidenceSimpleError("e-node " + std::to_string(e) +
                                    " has fewer than 2 members; not a hyper-multigraph");
    ++h.edges[mem];
  }
  return h;
}

// ---------------------------------------------------------------------------
// neighbourhood balls

struct RootedBall {
  IncidenceGraph graph;          // induced fragment (all incidences among included nodes)
  NodeRef root;                  // position of the root inside the fragment
  int radius = 0;
  std::vector<NodeRef> original;  // fragment node -> node of the host graph (V block, then E block)
};

// Induced ball of the given radius around root (bipartite BFS distance).
inline RootedBall ball(const IncidenceGraph& g, NodeRef root, int radius) {
  std::vector<int> dist(g.n_nodes(), -1);
  std::vector<int> order;
  const int rid = g.id_of(root);
  dist[rid] = 0;
  order.push_back(rid);
  for (std::size_t head = 0; head < order.size(); ++head) {
    int cur = order[head];
    if (dist[cur] == radius) continue;
    for (NodeRef nb : g.neighbors(g.ref_of(cur))) {
      int nid = g.id_of(nb);
      if (dist[nid] < 0) {
        dist[nid] = dist[cur] + 1;
        order.push_back(nid);
      }
    }
  }
  std::vector<int> vs, es;
  for (int id : order)
    (g.ref_of(id).side == Side::V ? vs : es).push_back(g.ref_of(id).index);
  std::sort(vs.begin(), vs.end());
  std::sort(es.begin(), es.end());
  std::map<int, int> vmap, emap;
  RootedBall b;
  b.radius = radius;
  b.graph = IncidenceGraph(static_cast<int>(vs.size()), static_cast<int>(es.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    vmap[vs[i]] = static_cast<int>(i);
    b.original.push_back({Side::V, vs[i]});
  }
  for (std::size_t i = 0; i < es.size(); ++i) {
    emap[es[i]] = static_cast<int>(i);
    b.original.push_back({Side::E, es[i]});
  }
  for (int v : vs)
    for (int e : g.edges_of(v))
      if (emap.count(e)) b.graph.add_incidence(vmap[v], emap[e]);
  b.root = root.side == Side::V ? NodeRef{Side::V, vmap[root.index]}
                                : NodeRef{Side::E, emap[root.index]};
  return b;
}

// ---------------------------------------------------------------------------
// serialization

inline void write_text(const IncidenceGraph& g, std::ostream& os) {
  os << g.n_v() << ' ' << g.n_e() << ' ' << g.m() << '\n';
  for (auto [v, e] : g.sorted_incidences()) os << v << ' ' << e << '\n';
}

inline std::string to_text(const IncidenceGraph& g) {
  std::ostringstream os;
  write_text(g, os);
  return os.str();
}

inline IncidenceGraph read_text(std::istream& is) {
  long long n_v = -1, n_e = -1, m = -1;
  if (!(is >> n_v >> n_e >> m) || n_v < 0 || n_e < 0 || m < 0)
    throw ConfigError("incidence text: bad header");
  IncidenceGraph g(static_cast<int>(n_v), static_cast<int>(n_e));
  for (long long i = 0; i < m; ++i) {
    long long v, e;
    if (!(is >> v >> e)) throw ConfigError("incidence text: truncated incidence list");
    if (v < 0 || v >= n_v || e < 0 || e >= n_e)
      throw ConfigError("incidence text: index out of range");
    g.add_incidence(static_cast<int>(v), static_cast<int>(e));
  }
  return g;
}

inline IncidenceGraph from_text(const std::string& text) {
  std::istringstream is(text);
  IncidenceGraph g = read_text(is);
  std::string extra;
  if (is >> extra) throw ConfigError("incidence text: trailing content after " +
                                     std::to_string(g.m()) + " incidences");
  return g;
}

inline nlohmann::json to_json(const IncidenceGraph& g) {
  nlohmann::json j;
  j["n_v"] = g.n_v();
  j["n_e"] = g.n_e();
  j["m"] = g.m();
  nlohmann::json inc = nlohmann::json::array();
  for (auto [v, e] : g.sorted_incidences()) inc.push_back({v, e});
  j["incidences"] = inc;
  return j;
}

inline IncidenceGraph graph_from_json(const nlohmann::json& j) {
  IncidenceGraph g(j.at("n_v").get<int>(), j.at("n_e").get<int>());
  for (auto& pair : j.at("incidences"))
    g.add_incidence(pair.at(0).get<int>(), pair.at(1).get<int>());
  if (g.m() != j.at("m").get<long long>()) throw ConfigError("incidence json: m mismatch");
  return g;
}

}  // namespace hmg
