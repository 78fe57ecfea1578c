#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "reeb/corpus.hpp"
#include "reeb/fixtures.hpp"
#include "reeb/reeb_graph.hpp"

using namespace reeb;

namespace {
ReebGraph single_edge(const Rat& lo, const Rat& hi) {
  return fixtures::segment(lo, hi);
}
}  // namespace

TEST_CASE("validate: minimal valid graph") {
  CHECK(validate(single_edge(Rat(0), Rat(1))).empty());
}

TEST_CASE("validate: flat edge is a violation") {
  ReebGraph g;
  g.nodes.push_back({"a", Rat(1)});
  g.nodes.push_back({"b", Rat(1)});
  g.edges.push_back({0, 1});
  g.reindex();
  auto v = validate(g);
  REQUIRE(!v.empty());
  CHECK(v[0].message.find("flat") != std::string::npos);
}

TEST_CASE("validate: disconnected") {
  ReebGraph g;
  g.nodes.push_back({"a", Rat(0)});
  g.nodes.push_back({"b", Rat(1)});
  g.nodes.push_back({"c", Rat(0)});
  g.nodes.push_back({"d", Rat(1)});
  g.edges.push_back({0, 1});
  g.edges.push_back({2, 3});
  g.reindex();
  auto v = validate(g);
  REQUIRE(!v.empty());
  CHECK(v[0].message.find("disconnected") != std::string::npos);
}

TEST_CASE("validate: self loop rejected") {
  ReebGraph g;
  g.nodes.push_back({"a", Rat(0)});
  g.edges.push_back({0, 0});
  g.reindex();
  CHECK(!validate(g).empty());
}

TEST_CASE("critical heights") {
  ReebGraph f = fixtures::cycle_f();
  auto hs = critical_heights(f);
  REQUIRE(hs.size() == 2);
  CHECK(hs[0] == Rat(-2));
  CHECK(hs[1] == Rat(2));

  auto seg = single_edge(Rat(0), Rat(1));
  auto hs2 = critical_heights(seg);
  CHECK(hs2 == std::vector<Rat>{Rat(0), Rat(1)});

  auto sub = subdivide(seg, {Rat(1, 2)});
  auto hs3 = critical_heights(sub.graph);
  CHECK(hs3 == std::vector<Rat>{Rat(0), Rat(1, 2), Rat(1)});
}

TEST_CASE("subdivide: single cut") {
  auto seg = single_edge(Rat(0), Rat(1));
  auto sub = subdivide(seg, {Rat(1, 2)});
  CHECK(sub.graph.nodes.size() == 3);
  CHECK(sub.graph.edges.size() == 2);
  CHECK(is_valid(sub.graph));
  // correspondence round trip
  Point p = make_edge_point(seg, 0, Rat(1, 4));
  Point q = sub.to_new(seg, p);
  CHECK(sub.to_old(seg, q) == p);
  // cut point becomes a node
  Point cut = sub.to_new(seg, make_edge_point(seg, 0, Rat(1, 2)));
  CHECK(cut.is_node());
}

TEST_CASE("subdivide: cuts outside spans leave the graph unchanged up to ids") {
  auto seg = single_edge(Rat(0), Rat(1));
  auto sub = subdivide(seg, {Rat(5), Rat(-3)});
  CHECK(sub.graph.nodes.size() == 2);
  CHECK(is_isomorphic(seg, sub.graph).has_value());
}

TEST_CASE("subdivide fixture cycle at 0 gives two degree-2 nodes") {
  auto f = fixtures::cycle_f();
  auto sub = subdivide(f, {Rat(0)});
  CHECK(sub.graph.nodes.size() == 4);
  CHECK(sub.graph.edges.size() == 4);
  // hand-built target
  ReebGraph h;
  h.nodes.push_back({"a", Rat(-2)});
  h.nodes.push_back({"m1", Rat(0)});
  h.nodes.push_back({"m2", Rat(0)});
  h.nodes.push_back({"b", Rat(2)});
  h.edges.push_back({0, 1});
  h.edges.push_back({1, 3});
  h.edges.push_back({0, 2});
  h.edges.push_back({2, 3});
  h.reindex();
  CHECK(is_isomorphic(sub.graph, h).has_value());
}

TEST_CASE("canonicalize removes regular nodes and is idempotent") {
  auto seg = single_edge(Rat(0), Rat(1));
  auto sub = subdivide(seg, {Rat(1, 2)});
  auto canon = canonicalize(sub.graph);
  CHECK(canon.graph.nodes.size() == 2);
  CHECK(canon.graph.edges.size() == 1);
  CHECK(is_isomorphic(canon.graph, seg).has_value());
  // point mapping through the removed node
  Point mid_new = canon.to_new(sub.graph, make_point_by_id(sub.graph, sub.graph.nodes[2].id));
  CHECK(!mid_new.is_node());

  auto f = fixtures::cycle_f();
  auto cf = canonicalize(f);
  CHECK(cf.graph.nodes.size() == 2);
  CHECK(cf.graph.edges.size() == 2);
}

TEST_CASE("canonicalize idempotent on a random corpus") {
  CorpusSpec spec;
  spec.count = 50;
  spec.kind = GraphKind::Reeb;
  spec.seed = 11;
  spec.node_budget = 7;
  for (const auto& g : generate_corpus(spec)) {
    auto c1 = canonicalize(g);
    auto c2 = canonicalize(c1.graph);
    CHECK(c1.graph.nodes.size() == c2.graph.nodes.size());
    CHECK(c1.graph.edges.size() == c2.graph.edges.size());
    CHECK(is_isomorphic(c1.graph, c2.graph).has_value());
  }
}

TEST_CASE("is_isomorphic: relabeled copy and mismatches") {
  auto f = fixtures::cycle_f();
  ReebGraph g = f;
  g.nodes[0].id = "zz";
  g.nodes[1].id = "yy";
  g.reindex();
  CHECK(is_isomorphic(f, g).has_value());

  CHECK(!is_isomorphic(single_edge(Rat(0), Rat(1)), single_edge(Rat(0), Rat(2)))
             .has_value());
  CHECK(!is_isomorphic(fixtures::cycle_f(), fixtures::segment_g()).has_value());
}

TEST_CASE("is_isomorphic returns a height-preserving bijection") {
  auto f = fixtures::m1();
  ReebGraph g = f;
  g.nodes[0].id = "x1";
  g.nodes[1].id = "x2";
  g.nodes[2].id = "x3";
  g.reindex();
  auto bij = is_isomorphic(f, g);
  REQUIRE(bij.has_value());
  auto cf = canonicalize(f), cg = canonicalize(g);
  for (auto& [a, b] : *bij) {
    int ia = cf.graph.node_index(a), ib = cg.graph.node_index(b);
    REQUIRE(ia >= 0);
    REQUIRE(ib >= 0);
    CHECK(cf.graph.nodes[ia].h == cg.graph.nodes[ib].h);
  }
}

TEST_CASE("tree predicates") {
  CHECK(!is_contour_tree(fixtures::cycle_f()));
  CHECK(!is_merge_tree(fixtures::cycle_f()));
  CHECK(is_contour_tree(fixtures::m1()));
  CHECK(is_merge_tree(fixtures::m1()));
  CHECK(is_contour_tree(fixtures::m1_upside_down()));
  CHECK(!is_merge_tree(fixtures::m1_upside_down()));
}

TEST_CASE("merge implies contour on a corpus; both preserved by subdivision") {
  CorpusSpec spec;
  spec.count = 40;
  spec.kind = GraphKind::Merge;
  spec.seed = 5;
  for (const auto& g : generate_corpus(spec)) {
    CHECK(is_merge_tree(g));
    CHECK(is_contour_tree(g));
    auto sub = subdivide(g, {Rat(1, 3), Rat(-1, 3)});
    CHECK(is_merge_tree(sub.graph));
  }
}

TEST_CASE("tree_geodesic basics") {
  auto t = fixtures::m1();
  Point l1 = make_point_by_id(t, "l1");
  Point l2 = make_point_by_id(t, "l2");
  SUBCASE("single point") {
    Walk w = tree_geodesic(t, l1, l1);
    CHECK(w.steps.empty());
  }
  SUBCASE("leaf to leaf passes the root") {
    Walk w = tree_geodesic(t, l1, l2);
    REQUIRE(w.steps.size() == 2);
    CHECK(w.steps[0].edge != w.steps[1].edge);
    CHECK(w.steps[0].to_h == Rat(3));
    CHECK(w.steps[1].from_h == Rat(3));
  }
  SUBCASE("interior points on the same edge") {
    Point p = make_edge_point(t, 0, Rat(1));
    Point q = make_edge_point(t, 0, Rat(2));
    Walk w = tree_geodesic(t, p, q);
    REQUIRE(w.steps.size() == 1);
    CHECK(w.steps[0].from_h == Rat(1));
    CHECK(w.steps[0].to_h == Rat(2));
  }
  SUBCASE("non-tree input throws") {
    auto f = fixtures::cycle_f();
    CHECK_THROWS_WITH_AS(
        tree_geodesic(f, make_point_by_id(f, "a"), make_point_by_id(f, "b")),
        "geodesic requires contour tree", std::invalid_argument);
  }
}

TEST_CASE("tree_geodesic against a BFS oracle on random contour trees") {
  CorpusSpec spec;
  spec.count = 30;
  spec.kind = GraphKind::Contour;
  spec.seed = 77;
  spec.node_budget = 8;
  SplitMix64 rng(123);
  for (const auto& t : generate_corpus(spec)) {
    for (int trial = 0; trial < 5; ++trial) {
      int a = int(rng.below(t.nodes.size()));
      int b = int(rng.below(t.nodes.size()));
      Point p = make_node_point(t, a), q = make_node_point(t, b);
      Walk w = tree_geodesic(t, p, q);
      CHECK(w.start == p);
      CHECK(w.end == q);
      // edges pairwise distinct (injectivity)
      std::set<int> seen;
      for (auto& s : w.steps) CHECK(seen.insert(s.edge).second);
      // contiguity of heights
      for (std::size_t i = 0; i + 1 < w.steps.size(); ++i)
        CHECK(w.steps[i].to_h == w.steps[i + 1].from_h);
      if (!w.steps.empty()) {
        CHECK(w.steps.front().from_h == point_height(t, p));
        CHECK(w.steps.back().to_h == point_height(t, q));
      }
    }
  }
}
