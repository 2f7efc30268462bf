#pragma once

// Hanf-locality toolkit: the multiset of radius-r neighbourhood types with
// counts capped at a threshold q, and the induced sufficient condition for
// elementary equivalence up to quantifier depth q. Two structures whose
// capped sphere signatures agree at radius 3^q satisfy the same sentences of
// quantifier depth <= q; disagreement of signatures decides nothing, so the
// comparison is sound for "equivalent", not for "distinguishable".

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "hmg/canonical.hpp"
#include "hmg/errors.hpp"
#include "hmg/incidence.hpp"

namespace hmg {

struct SphereSignature {
  int q = 0;
  int radius = 0;
  // canonical rooted type of the radius-`radius` ball, with pendant runs and
  // final counts both capped at q (counts above q are all recorded as q)
  std::map<std::string, long long> counts;

  bool operator==(const SphereSignature& o) const {
    return q == o.q && radius == o.radius && counts == o.counts;
  }
  bool operator!=(const SphereSignature& o) const { return !(*this == o); }
};

inline SphereSignature sphere_signature(const IncidenceGraph& g, int q, int radius) {
  if (q < 1) throw ConfigError("sphere signature needs q >= 1");
  if (radius < 0) throw ConfigError("sphere signature needs radius >= 0");
  SphereSignature sig;
  sig.q = q;
  sig.radius = radius;
  for (int v = 0; v < g.n_v(); ++v)
    sig.counts[canonical_type(ball(g, NodeRef{Side::V, v}, radius), q).canonical_key] += 1;
  for (int e = 0; e < g.n_e(); ++e)
    sig.counts[canonical_type(ball(g, NodeRef{Side::E, e}, radius), q).canonical_key] += 1;
  for (auto& [key, count] : sig.counts) count = std::min<long long>(count, q);
  return sig;
}

// Hanf radius for quantifier depth q: 3^q, saturated at the int ceiling
// (balls never outgrow the graph, so saturation is harmless).
inline int hanf_radius(int q) {
  long long r = 1;
  for (int i = 0; i < q; ++i) {
    r *= 3;
    if (r > 1000000000) return 1000000000;
  }
  return static_cast<int>(r);
}

// Sound one-sided test: true means g1 and g2 agree on every sentence of
// quantifier depth <= q; false means the test was inconclusive. The radius
// override exists for the sharper variants ((3^q - 1) / 2 and friends).
inline bool hanf_equivalent(const IncidenceGraph& g1, const IncidenceGraph& g2, int q,
                            std::optional<int> radius_override = std::nullopt) {
  int radius = radius_override ? *radius_override : hanf_radius(q);
  return sphere_signature(g1, q, radius) == sphere_signature(g2, q, radius);
}

}  // namespace hmg
