#pragma once

// Canonical forms for incidence-graph fragments.
//
// Rooted tree balls get an AHU-style encoding (with optional sibling-multiplicity
// capping, the q-sphere quotient). Cyclic or unrooted fragments get an exact
// canonical labeling by colour refinement with individualization backtracking
// (minimum encoding over the search tree). Two fragments receive equal keys iff
// they are (root- and) side-preserving isomorphic, multiplicities included.
// Intended for desk-scale fragments (balls, patterns, small graphs), not n-scale
// canonicalization.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hmg/incidence.hpp"

namespace hmg {

struct RootedType {
  std::string canonical_key;
  bool is_tree = false;
  long long exc = 0;  // excess of the fragment
  bool operator==(const RootedType&) const = default;
};

namespace canon_detail {

// distinct-neighbour adjacency with multiplicities, over unified node ids
inline std::vector<std::vector<std::pair<int, int>>> mult_adjacency(const IncidenceGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.n_nodes());
  for (int v = 0; v < g.n_v(); ++v) {
    std::vector<int> es = g.edges_of(v);
    std::sort(es.begin(), es.end());
    for (std::size_t i = 0; i < es.size();) {
      std::size_t j = i;
      while (j < es.size() && es[j] == es[i]) ++j;
      int e = es[i], mult = static_cast<int>(j - i);
      adj[v].push_back({g.n_v() + e, mult});
      adj[g.n_v() + e].push_back({v, mult});
      i = j;
    }
  }
  for (auto& lst : adj) std::sort(lst.begin(), lst.end());
  return adj;
}

// connected + m == nodes-1 implies no parallel incidences and no cycles
inline bool is_tree_fragment(const IncidenceGraph& g, bool connected) {
  return connected && g.m() == g.n_nodes() - 1;
}

inline bool is_connected(const IncidenceGraph& g) {
  if (g.n_nodes() == 0) return true;
  std::vector<char> seen(g.n_nodes(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (NodeRef nb : g.neighbors(g.ref_of(u))) {
      int id = g.id_of(nb);
      if (!seen[id]) {
        seen[id] = 1;
        ++count;
        stack.push_back(id);
      }
    }
  }
  return count == g.n_nodes();
}

// AHU key of the subtree rooted at `u` coming from `parent`; cap < 0 means no
// capping, otherwise runs of more than `cap` equal sibling keys are truncated.
inline std::string ahu_key(const IncidenceGraph& g, int u, int parent, int cap) {
  std::vector<std::string> kid_keys;
  for (NodeRef nb : g.neighbors(g.ref_of(u))) {
    int id = g.id_of(nb);
    if (id == parent) continue;
    kid_keys.push_back(ahu_key(g, id, u, cap));
  }
  std::sort(kid_keys.begin(), kid_keys.end());
  std::string out(1, g.ref_of(u).side == Side::V ? 'V' : 'E');
  out += '(';
  int run = 0;
  for (std::size_t i = 0; i < kid_keys.size(); ++i) {
    run = (i > 0 && kid_keys[i] == kid_keys[i - 1]) ? run + 1 : 1;
    if (cap >= 0 && run > cap) continue;
    out += kid_keys[i];
  }
  out += ')';
  return out;
}

// Exact canonical encoding of a connected fragment via refinement +
// individualization. `forced` lists nodes given unique colours, in order.
struct Refiner {
  const IncidenceGraph& g;
  const std::vector<std::vector<std::pair<int, int>>>& adj;
  int root;  // -1 for unrooted

  std::string encode(const std::vector<int>& order) const {
    // order[rank] = node id
    std::vector<int> rank(g.n_nodes());
    for (int r = 0; r < static_cast<int>(order.size()); ++r) rank[order[r]] = r;
    std::string s;
    s.reserve(static_cast<std::size_t>(g.n_nodes()) * 4 + 16);
    for (int r = 0; r < static_cast<int>(order.size()); ++r)
      s += g.ref_of(order[r]).side == Side::V ? 'V' : 'E';
    s += '#';
    if (root >= 0) s += std::to_string(rank[root]);
    s += '#';
    std::vector<std::array<int, 3>> edges;
    for (int u = 0; u < g.n_nodes(); ++u)
      for (auto [w, mult] : adj[u])
        if (rank[u] < rank[w]) edges.push_back({rank[u], rank[w], mult});
    std::sort(edges.begin(), edges.end());
    for (auto& e : edges) {
      s += std::to_string(e[0]);
      s += ',';
      s += std::to_string(e[1]);
      s += ':';
      s += std::to_string(e[2]);
      s += ';';
    }
    return s;
  }

  // refine colours until stable; returns number of classes
  int refine(std::vector<int>& color) const {
    const int n = g.n_nodes();
    int classes = 0;
    {
      std::vector<int> sorted(color);
      std::sort(sorted.begin(), sorted.end());
      classes = static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    }
    while (true) {
      using Sig = std::pair<int, std::vector<std::pair<int, int>>>;
      std::vector<Sig> sigs(n);
      for (int u = 0; u < n; ++u) {
        std::vector<std::pair<int, int>> nb;
        nb.reserve(adj[u].size());
        for (auto [w, mult] : adj[u]) nb.push_back({color[w], mult});
        std::sort(nb.begin(), nb.end());
        sigs[u] = {color[u], std::move(nb)};
      }
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return sigs[a] < sigs[b]; });
      std::vector<int> next(n);
      int c = 0;
      for (int i = 0; i < n; ++i) {
        if (i > 0 && sigs[idx[i]] != sigs[idx[i - 1]]) ++c;
        next[idx[i]] = c;
      }
      int new_classes = c + 1;
      bool stable = new_classes == classes;
      classes = new_classes;
      color = std::move(next);  // always adopt the normalized 0..classes-1 values
      if (stable) return classes;
    }
  }

  std::string canonical(std::vector<int> color) const {
    const int n = g.n_nodes();
    int classes = refine(color);
    if (classes == n) {
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return color[a] < color[b]; });
      return encode(order);
    }
    // first colour class with >= 2 members
    int target = -1;
    {
      std::vector<int> size(classes, 0);
      for (int u = 0; u < n; ++u) ++size[color[u]];
      for (int c = 0; c < classes; ++c)
        if (size[c] >= 2) {
          target = c;
          break;
        }
    }
    std::string best;
    for (int u = 0; u < n; ++u) {
      if (color[u] != target) continue;
      std::vector<int> child(color);
      for (int w = 0; w < n; ++w)
        child[w] = 2 * child[w] + (w == u ? 1 : 0);  // split u off its class, keep order
      std::string s = canonical(std::move(child));
      if (best.empty() || s < best) best = std::move(s);
    }
    return best;
  }
};

inline std::string canonical_connected(const IncidenceGraph& g, int root) {
  if (g.n_nodes() == 0) return "()";
  auto adj = mult_adjacency(g);
  Refiner ref{g, adj, root};
  std::vector<int> color(g.n_nodes());
  for (int u = 0; u < g.n_nodes(); ++u)
    color[u] = 2 * (g.ref_of(u).side == Side::V ? 0 : 1) + (u == root ? 1 : 0);
  return ref.canonical(std::move(color));
}

// extract the connected component containing `start` as a fragment
inline RootedBall component_of(const IncidenceGraph& g, NodeRef start) {
  return ball(g, start, g.n_nodes());  // radius >= diameter
}

// Cap-mode reduction of a cyclic rooted ball: strip to the root-core, prune
// isomorphic sibling pendant subtrees beyond `cap` at every level, and return
// the induced fragment on the kept nodes (with the root's new position).
inline std::pair<IncidenceGraph, int> cap_pendants(const IncidenceGraph& g, int root, int cap) {
  const int n = g.n_nodes();
  auto adj = mult_adjacency(g);
  std::vector<int> deg(n);
  for (int u = 0; u < n; ++u) {
    int d = 0;
    for (auto [w, mult] : adj[u]) d += mult;
    deg[u] = d;
  }
  // iteratively remove non-root leaves; survivors form the root-core
  std::vector<char> removed(n, 0);
  std::vector<int> queue;
  for (int u = 0; u < n; ++u)
    if (u != root && deg[u] <= 1) queue.push_back(u);
  while (!queue.empty()) {
    int u = queue.back();
    queue.pop_back();
    if (removed[u] || u == root || deg[u] > 1) continue;
    removed[u] = 1;
    for (auto [w, mult] : adj[u]) {
      if (removed[w]) continue;
      deg[w] -= mult;
      if (w != root && deg[w] <= 1) queue.push_back(w);
    }
  }
  // keep[] starts with the core; pendant subtrees hang off core anchors
  std::vector<char> keep(n, 0);
  for (int u = 0; u < n; ++u)
    if (!removed[u]) keep[u] = 1;

  // Pendant subtrees are pruned in two passes: bottom-up capped-AHU keys for
  // every pendant node, then a top-down walk keeping at most `cap` siblings per
  // isomorphism group (a subtree survives only if all its ancestors did).
  std::vector<std::string> key(n);
  {
    struct KeyWalk {
      const std::vector<std::vector<std::pair<int, int>>>& adj;
      const std::vector<char>& removed;
      const IncidenceGraph& g;
      std::vector<std::string>& key;
      int cap;
      std::string run(int u, int p) {
        std::vector<std::string> kids;
        for (auto [w, mult] : adj[u])
          if (w != p && removed[w]) kids.push_back(run(w, u));
        std::sort(kids.begin(), kids.end());
        std::string k(1, g.ref_of(u).side == Side::V ? 'V' : 'E');
        k += '(';
        int run_len = 0;
        for (std::size_t i = 0; i < kids.size(); ++i) {
          run_len = (i > 0 && kids[i] == kids[i - 1]) ? run_len + 1 : 1;
          if (run_len > cap) continue;  // capped keys describe the quotient
          k += kids[i];
        }
        k += ')';
        key[u] = k;
        return k;
      }
    } kw{adj, removed, g, key, cap};
    for (int u = 0; u < n; ++u)
      if (!removed[u])
        for (auto [w, mult] : adj[u])
          if (removed[w]) kw.run(w, u);
  }
  {
    // top-down keep: anchors are core nodes; group pendant children by key
    struct KeepWalk {
      const std::vector<std::vector<std::pair<int, int>>>& adj;
      const std::vector<char>& removed;
      const std::vector<std::string>& key;
      std::vector<char>& keep;
      int cap;
      void keep_children(int u, int p, bool parent_is_core) {
        std::vector<std::pair<std::string, int>> kids;
        for (auto [w, mult] : adj[u])
          if (removed[w] && (parent_is_core || w != p)) kids.push_back({key[w], w});
        std::sort(kids.begin(), kids.end());
        int run_len = 0;
        for (std::size_t i = 0; i < kids.size(); ++i) {
          run_len = (i > 0 && kids[i].first == kids[i - 1].first) ? run_len + 1 : 1;
          if (run_len > cap) continue;
          keep[kids[i].second] = 1;
          keep_children(kids[i].second, u, false);
        }
      }
    } kwk{adj, removed, key, keep, cap};
    for (int u = 0; u < n; ++u)
      if (!removed[u]) kwk.keep_children(u, -1, true);
  }
  // rebuild induced fragment on kept nodes
  std::vector<int> vs, es;
  for (int u = 0; u < n; ++u)
    if (keep[u]) (g.ref_of(u).side == Side::V ? vs : es).push_back(g.ref_of(u).index);
  std::map<int, int> vmap, emap;
  for (std::size_t i = 0; i < vs.size(); ++i) vmap[vs[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < es.size(); ++i) emap[es[i]] = static_cast<int>(i);
  IncidenceGraph out(static_cast<int>(vs.size()), static_cast<int>(es.size()));
  for (int v : vs)
    for (int e : g.edges_of(v))
      if (emap.count(e)) out.add_incidence(vmap[v], emap[e]);
  NodeRef r = g.ref_of(root);
  int new_root = r.side == Side::V ? vmap[r.index] : static_cast<int>(vs.size()) + emap[r.index];
  return {std::move(out), new_root};
}

}  // namespace canon_detail

// Canonical key of a whole graph (side-preserving, multiplicities included;
// disconnected inputs are keyed by their sorted component keys).
inline std::string canonical_key(const IncidenceGraph& g) {
  std::vector<char> seen(g.n_nodes(), 0);
  std::vector<std::string> keys;
  for (int u = 0; u < g.n_nodes(); ++u) {
    if (seen[u]) continue;
    RootedBall comp = canon_detail::component_of(g, g.ref_of(u));
    for (NodeRef orig : comp.original) seen[g.id_of(orig)] = 1;
    keys.push_back(canon_detail::canonical_connected(comp.graph, -1));
  }
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (auto& k : keys) {
    out += k;
    out += '|';
  }
  return out;
}

inline bool isomorphic(const IncidenceGraph& a, const IncidenceGraph& b) {
  if (a.n_v() != b.n_v() || a.n_e() != b.n_e() || a.m() != b.m()) return false;
  return canonical_key(a) == canonical_key(b);
}

// Rooted canonical type of a ball. Plain mode (no cap): exact rooted isomorphism
// key. Cap mode: sibling pendant-subtree multiplicities above `cap` are pruned
// before canonicalization (the q-sphere quotient; for tree balls this is exactly
// the capped AHU encoding).
inline RootedType canonical_type(const RootedBall& b, std::optional<int> cap = std::nullopt) {
  const IncidenceGraph& g = b.graph;
  RootedType t;
  t.exc = excess(g);
  const int root = g.id_of(b.root);
  const bool tree = canon_detail::is_tree_fragment(g, true);  // balls are connected
  t.is_tree = tree;
  if (tree) {
    t.canonical_key = "T:" + canon_detail::ahu_key(g, root, -1, cap ? *cap : -1);
    return t;
  }
  if (!cap) {
    t.canonical_key = "C:" + canon_detail::canonical_connected(g, root);
    return t;
  }
  auto [reduced, new_root] = canon_detail::cap_pendants(g, root, *cap);
  t.canonical_key = "C:" + canon_detail::canonical_connected(reduced, new_root);
  return t;
}

}  // namespace hmg
