#pragma once

// Two-sorted branching process approximating the local neighbourhood of a
// uniformly chosen node: the root draws its degree from the plain law of its
// side; every deeper node arrived through one link, so its offspring count
// follows the size-biased shifted law d*(x) = (x+1) d(x+1) / E[d] of its
// side. Sides alternate along the tree (vertex / hyperedge).
//
// Trees are sampled to a depth cap; nodes sitting exactly at the cap carry a
// `truncated` flag because their offspring were never drawn. Probability
// calculations reject trees containing truncated nodes (the observed shape
// has no well-defined mass); realisability checks skip them instead, since a
// truncated node constrains nothing below itself.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmg/canonical.hpp"
#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"
#include "hmg/incidence.hpp"
#include "hmg/rng.hpp"
#include "json.hpp"

namespace hmg {

struct BGWSpec {
  LimitDistribution vdist;
  LimitDistribution edist;
  Side root_side = Side::V;

  const LimitDistribution& plain(Side s) const { return s == Side::V ? vdist : edist; }
};

struct BGWTree {
  Side side = Side::V;
  bool truncated = false;  // node sits at the depth cap; offspring not drawn
  std::vector<BGWTree> children;

  bool operator==(const BGWTree&) const = default;
};

inline bool tree_truncated(const BGWTree& t) {
  if (t.truncated) return true;
  for (const BGWTree& c : t.children)
    if (tree_truncated(c)) return true;
  return false;
}

inline int tree_depth(const BGWTree& t) {
  int d = 0;
  for (const BGWTree& c : t.children) d = std::max(d, 1 + tree_depth(c));
  return d;
}

inline long long tree_size(const BGWTree& t) {
  long long n = 1;
  for (const BGWTree& c : t.children) n += tree_size(c);
  return n;
}

namespace bgw_detail {

// offspring laws materialize lazily: a root that never branches must not
// force size-biasing a law for which it is undefined
struct OffspringLaws {
  const BGWSpec& spec;
  std::optional<LimitDistribution> v_off, e_off;

  const LimitDistribution& of(Side s) {
    auto& slot = s == Side::V ? v_off : e_off;
    if (!slot) slot = spec.plain(s).size_biased();
    return *slot;
  }
};

inline BGWTree sample_node(OffspringLaws& laws, Side side, int depth, int max_depth, Rng& rng,
                           bool is_root) {
  BGWTree node;
  node.side = side;
  if (depth == max_depth) {
    node.truncated = true;
    return node;
  }
  int count = is_root ? laws.spec.plain(side).sample(rng) : laws.of(side).sample(rng);
  node.children.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    node.children.push_back(sample_node(laws, other(side), depth + 1, max_depth, rng, false));
  return node;
}

inline double node_probability(const BGWSpec& spec, const BGWTree& node, bool is_root) {
  if (node.truncated)
    throw TruncatedTreeError("tree probability undefined below the depth cap");
  int count = static_cast<int>(node.children.size());
  double p = is_root ? spec.plain(node.side).mass(count)
                     : spec.plain(node.side).size_biased_mass(count);
  for (const BGWTree& c : node.children) p *= node_probability(spec, c, false);
  return p;
}

inline bool node_realisable(const BGWSpec& spec, const BGWTree& node, bool is_root) {
  if (node.truncated) return true;  // nothing drawn below; no constraint
  int count = static_cast<int>(node.children.size());
  bool ok = is_root ? spec.plain(node.side).in_support(count)
                    : spec.plain(node.side).in_support(count + 1);
  if (!ok) return false;
  for (const BGWTree& c : node.children)
    if (!node_realisable(spec, c, false)) return false;
  return true;
}

}  // namespace bgw_detail

inline BGWTree sample_tree(const BGWSpec& spec, int max_depth, Rng& rng) {
  if (max_depth < 0) throw ConfigError("sample_tree: max_depth must be >= 0");
  bgw_detail::OffspringLaws laws{spec, std::nullopt, std::nullopt};
  return bgw_detail::sample_node(laws, spec.root_side, 0, max_depth, rng, true);
}

inline BGWTree sample_tree(const BGWSpec& spec, int max_depth, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, {0});
  return sample_tree(spec, max_depth, rng);
}

// Product of the offspring masses of every node (plain law at the root,
// size-biased shifted law deeper). Throws TruncatedTreeError if any node
// carries the truncation flag.
inline double tree_probability(const BGWSpec& spec, const BGWTree& tree) {
  return bgw_detail::node_probability(spec, tree, true);
}

// True iff every drawn offspring count lies in the support of its law, i.e.
// the tree has positive probability. Truncated nodes impose no constraint.
inline bool realisable_tree(const BGWSpec& spec, const BGWTree& tree) {
  return bgw_detail::node_realisable(spec, tree, true);
}

// Materialize the tree as a rooted incidence fragment (for canonical typing
// against balls of sampled graphs).
inline RootedBall tree_to_ball(const BGWTree& tree) {
  int n_v = 0, n_e = 0;
  // first pass: count nodes per side
  std::vector<const BGWTree*> stack = {&tree};
  while (!stack.empty()) {
    const BGWTree* t = stack.back();
    stack.pop_back();
    (t->side == Side::V ? n_v : n_e) += 1;
    for (const BGWTree& c : t->children) stack.push_back(&c);
  }
  IncidenceGraph g(n_v, n_e);
  int next_v = 0, next_e = 0;
  struct Frame {
    const BGWTree* node;
    int id;  // per-side index of this node
  };
  std::vector<Frame> todo;
  int root_id = tree.side == Side::V ? next_v++ : next_e++;
  todo.push_back({&tree, root_id});
  while (!todo.empty()) {
    Frame f = todo.back();
    todo.pop_back();
    for (const BGWTree& c : f.node->children) {
      int cid = c.side == Side::V ? next_v++ : next_e++;
      if (c.side == Side::E)
        g.add_incidence(f.id, cid);
      else
        g.add_incidence(cid, f.id);
      todo.push_back({&c, cid});
    }
  }
  RootedBall b;
  b.graph = std::move(g);
  b.root = NodeRef{tree.side, 0};
  b.radius = tree_depth(tree);
  return b;
}

// Monte-Carlo law of the canonical root type at the given radius: sample
// `samples` trees to depth `radius` and tally canonical type keys. `cap`
// forwards to canonical typing (pendant-capped types).
inline std::map<std::string, double> ball_type_distribution(
    const BGWSpec& spec, int radius, long long samples, std::uint64_t seed,
    std::optional<int> cap = std::nullopt) {
  if (samples <= 0) throw ConfigError("ball_type_distribution: samples must be positive");
  std::map<std::string, double> freq;
  for (long long i = 0; i < samples; ++i) {
    Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(i)});
    BGWTree t = sample_tree(spec, radius, rng);
    freq[canonical_type(tree_to_ball(t), cap).canonical_key] += 1.0;
  }
  for (auto& [key, f] : freq) f /= static_cast<double>(samples);
  return freq;
}

inline nlohmann::json bgw_tree_to_json(const BGWTree& t) {
  nlohmann::json j;
  j["side"] = t.side == Side::V ? "V" : "E";
  if (t.truncated) j["truncated"] = true;
  nlohmann::json kids = nlohmann::json::array();
  for (const BGWTree& c : t.children) kids.push_back(bgw_tree_to_json(c));
  j["children"] = std::move(kids);
  return j;
}

inline BGWTree bgw_tree_from_json(const nlohmann::json& j) {
  BGWTree t;
  std::string side = j.at("side").get<std::string>();
  if (side == "V")
    t.side = Side::V;
  else if (side == "E")
    t.side = Side::E;
  else
    throw ConfigError("tree json: side must be V or E");
  t.truncated = j.value("truncated", false);
  if (j.contains("children"))
    for (const auto& c : j.at("children")) t.children.push_back(bgw_tree_from_json(c));
  return t;
}

}  // namespace hmg
