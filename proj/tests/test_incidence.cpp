#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>
#include <vector>

#include "hmg/canonical.hpp"
#include "hmg/incidence.hpp"

using hmg::HyperMultigraph;
using hmg::IncidenceGraph;
using hmg::NodeRef;
using hmg::Side;

// double edge {v1,v2} (e0, e1) plus hyper-edge {v2,v3,v4} (e2)
static IncidenceGraph running_example() {
  IncidenceGraph g(4, 3);
  g.add_incidence(0, 0);
  g.add_incidence(1, 0);
  g.add_incidence(0, 1);
  g.add_incidence(1, 1);
  g.add_incidence(1, 2);
  g.add_incidence(2, 2);
  g.add_incidence(3, 2);
  return g;
}

// e0 = {v1, v2}, e1 = {v0, v1, v2}
static IncidenceGraph five_node_example() {
  IncidenceGraph g(3, 2);
  g.add_incidence(1, 0);
  g.add_incidence(2, 0);
  g.add_incidence(0, 1);
  g.add_incidence(1, 1);
  g.add_incidence(2, 1);
  return g;
}

TEST_CASE("hyper-multigraph to incidence graph: sizes") {
  HyperMultigraph h;
  h.n = 4;
  h.edges[{0, 1}] = 2;     // double edge
  h.edges[{1, 2, 3}] = 1;  // one 3-edge
  IncidenceGraph g = hmg::to_incidence(h);
  REQUIRE(g.n_v() == 4);
  REQUIRE(g.n_e() == 3);
  REQUIRE(g.m() == 7);
  REQUIRE(hmg::isomorphic(g, running_example()));
}

TEST_CASE("round trip through the set-system view") {
  IncidenceGraph g = running_example();
  HyperMultigraph h = hmg::from_incidence(g);
  REQUIRE(h.n == 4);
  REQUIRE(h.edge_count() == 3);
  REQUIRE(h.edges.at({0, 1}) == 2);
  REQUIRE(h.edges.at({1, 2, 3}) == 1);
  REQUIRE(hmg::isomorphic(hmg::to_incidence(h), g));
}

TEST_CASE("from_incidence rejects repeated incidences and tiny edges") {
  IncidenceGraph loop(1, 1);
  loop.add_incidence(0, 0);
  loop.add_incidence(0, 0);  // vertex twice in the same edge
  REQUIRE(!loop.simple_incidence());
  REQUIRE_THROWS_AS(hmg::from_incidence(loop), hmg::NotIncidenceSimpleError);

  IncidenceGraph tiny(2, 1);
  tiny.add_incidence(0, 0);  // edge of size 1
  REQUIRE_THROWS_AS(hmg::from_incidence(tiny), hmg::NotIncidenceSimpleError);
}

TEST_CASE("degrees, multiplicities and census of the running example") {
  IncidenceGraph g = running_example();
  REQUIRE(g.degree(NodeRef{Side::V, 0}) == 2);
  REQUIRE(g.degree(NodeRef{Side::V, 1}) == 3);
  REQUIRE(g.degree(NodeRef{Side::V, 3}) == 1);
  REQUIRE(g.degree(NodeRef{Side::E, 2}) == 3);
  REQUIRE(g.multiplicity(0, 0) == 1);
  REQUIRE(g.multiplicity(0, 2) == 0);
  REQUIRE(g.simple_incidence());
  REQUIRE(!g.no_duplicate_hyperedges());  // e0 and e1 have the same members

  auto [vcensus, ecensus] = hmg::degree_census(g);
  REQUIRE(vcensus.counts == std::map<int, long long>{{1, 2}, {2, 1}, {3, 1}});
  REQUIRE(ecensus.counts == std::map<int, long long>{{2, 2}, {3, 1}});
}

TEST_CASE("five-node example census") {
  auto [vcensus, ecensus] = hmg::degree_census(five_node_example());
  REQUIRE(vcensus.counts == std::map<int, long long>{{1, 1}, {2, 2}});
  REQUIRE(ecensus.counts == std::map<int, long long>{{2, 1}, {3, 1}});
}

TEST_CASE("excess: tree -1, unicyclic 0, denser positive") {
  IncidenceGraph path(2, 1);  // v0 - e0 - v1
  path.add_incidence(0, 0);
  path.add_incidence(1, 0);
  REQUIRE(hmg::excess(path) == -1);  // 3 nodes, 2 incidences

  REQUIRE(hmg::excess(five_node_example()) == 0);  // unicyclic: v1-e0-v2-e1
  REQUIRE(hmg::excess(running_example()) == 0);    // unicyclic: v0-e0-v1-e1

  IncidenceGraph dense(2, 3);  // three parallel 2-edges on two vertices
  for (int e = 0; e < 3; ++e) {
    dense.add_incidence(0, e);
    dense.add_incidence(1, e);
  }
  REQUIRE(hmg::excess(dense) == 1);  // 5 nodes, 6 incidences
}

TEST_CASE("ball of radius 1 around the degree-3 vertex is a 3-star") {
  IncidenceGraph g = running_example();
  hmg::RootedBall b = hmg::ball(g, NodeRef{Side::V, 1}, 1);
  REQUIRE(b.graph.n_v() == 1);
  REQUIRE(b.graph.n_e() == 3);
  REQUIRE(b.graph.m() == 3);
  REQUIRE(b.root == NodeRef{Side::V, 0});
  REQUIRE(b.graph.degree(b.root) == 3);
  // radius 2 pulls in every vertex: the whole graph is within distance 2 of v1
  hmg::RootedBall b2 = hmg::ball(g, NodeRef{Side::V, 1}, 2);
  REQUIRE(b2.graph.n_nodes() == 7);
  REQUIRE(b2.graph.m() == 7);
}

TEST_CASE("ball keeps multiplicities inside the radius") {
  IncidenceGraph dense(2, 1);
  dense.add_incidence(0, 0);
  dense.add_incidence(0, 0);
  dense.add_incidence(1, 0);
  hmg::RootedBall b = hmg::ball(dense, NodeRef{Side::V, 0}, 1);
  REQUIRE(b.graph.m() == 2);  // both copies of (v0, e0) survive; v1 is cut off
  REQUIRE(b.graph.n_v() == 1);
}

TEST_CASE("text serialization round trip with sorted incidence lines") {
  IncidenceGraph g = running_example();
  std::string text = hmg::to_text(g);
  REQUIRE(text.substr(0, 6) == "4 3 7\n");
  IncidenceGraph back = hmg::from_text(text);
  REQUIRE(back == g);
  REQUIRE(hmg::to_text(back) == text);
}

TEST_CASE("text parser rejects malformed input") {
  REQUIRE_THROWS_AS(hmg::from_text("2 1\n"), hmg::ConfigError);            // bad header
  REQUIRE_THROWS_AS(hmg::from_text("2 1 2\n0 0\n"), hmg::ConfigError);     // truncated
  REQUIRE_THROWS_AS(hmg::from_text("2 1 1\n5 0\n"), hmg::ConfigError);     // out of range
  REQUIRE_THROWS_AS(hmg::from_text("2 1 1\n0 0\n1 0\n"), hmg::ConfigError);  // extra line
}

TEST_CASE("json serialization round trip") {
  IncidenceGraph g = five_node_example();
  auto j = hmg::to_json(g);
  REQUIRE(j["n_v"] == 3);
  REQUIRE(j["n_e"] == 2);
  REQUIRE(j["m"] == 5);
  IncidenceGraph back = hmg::graph_from_json(j);
  REQUIRE(back == g);
  j["m"] = 4;
  REQUIRE_THROWS_AS(hmg::graph_from_json(j), hmg::ConfigError);
}

TEST_CASE("unified node ids partition into V block then E block") {
  IncidenceGraph g = five_node_example();
  REQUIRE(g.n_nodes() == 5);
  REQUIRE(g.id_of(NodeRef{Side::V, 2}) == 2);
  REQUIRE(g.id_of(NodeRef{Side::E, 0}) == 3);
  REQUIRE(g.ref_of(4) == NodeRef{Side::E, 1});
}
