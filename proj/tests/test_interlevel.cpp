#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "reeb/corpus.hpp"
#include "reeb/fixtures.hpp"
#include "reeb/interlevel.hpp"
#include "reeb/parallel.hpp"

using namespace reeb;

TEST_CASE("interlevel components of the fixture cycle") {
  auto f = fixtures::cycle_f();
  SUBCASE("waist interval separates the arcs") {
    auto part = interlevel_components(f, Interval(Rat(-1), Rat(1)));
    CHECK(part.count() == 2);
  }
  SUBCASE("full range is connected") {
    auto part = interlevel_components(f, Interval(Rat(-2), Rat(2)));
    CHECK(part.count() == 1);
  }
  SUBCASE("empty preimage") {
    auto seg = fixtures::segment(Rat(0), Rat(1));
    auto part = interlevel_components(seg, Interval(Rat(2), Rat(3)));
    CHECK(part.count() == 0);
  }
}

TEST_CASE("full range yields one component for every valid graph") {
  CorpusSpec spec;
  spec.count = 40;
  spec.kind = GraphKind::Reeb;
  spec.seed = 2;
  for (const auto& g : generate_corpus(spec)) {
    auto part =
        interlevel_components(g, Interval(g.min_height(), g.max_height()));
    CHECK(part.count() == 1);
  }
}

TEST_CASE("figure-1 connectivity facts") {
  auto f = fixtures::tailed_cycle_f();
  Point x = fixtures::tailed_cycle_x();
  Point z = fixtures::tailed_cycle_z();
  CHECK(connected_in_interlevel(f, x, z, Interval(Rat(-2), Rat(0))));
  CHECK(!connected_in_interlevel(f, x, z, Interval(Rat(-1), Rat(1))));
  CHECK(connected_in_interlevel(f, x, x, Interval(Rat(0), Rat(0))));
  CHECK_THROWS_WITH_AS(
      connected_in_interlevel(f, x, z, Interval(Rat(1), Rat(2))),
      "point outside interlevel", std::invalid_argument);
}

TEST_CASE("connectivity is symmetric and monotone in the interval") {
  CorpusSpec spec;
  spec.count = 20;
  spec.kind = GraphKind::Reeb;
  spec.seed = 31;
  SplitMix64 rng(7);
  for (const auto& g : generate_corpus(spec)) {
    auto crit = critical_heights(g);
    for (int trial = 0; trial < 10; ++trial) {
      int a = int(rng.below(g.nodes.size()));
      int b = int(rng.below(g.nodes.size()));
      Point p = make_node_point(g, a), q = make_node_point(g, b);
      Rat lo = min(g.nodes[a].h, g.nodes[b].h);
      Rat hi = max(g.nodes[a].h, g.nodes[b].h);
      Interval small(lo, hi);
      Interval big(lo - Rat(1), hi + Rat(1));
      bool c_small = connected_in_interlevel(g, p, q, small);
      CHECK(c_small == connected_in_interlevel(g, q, p, small));
      if (c_small) CHECK(connected_in_interlevel(g, p, q, big));
    }
  }
}

TEST_CASE("path height distance on fixtures") {
  auto f = fixtures::tailed_cycle_f();
  Point x = fixtures::tailed_cycle_x();
  Point z = fixtures::tailed_cycle_z();
  CHECK(path_height_distance(f, x, x) == Rat(0));
  CHECK(path_height_distance(f, x, z) == Rat(2));
  auto seg = fixtures::segment(Rat(0), Rat(1));
  CHECK(path_height_distance(seg, make_point_by_id(seg, "lo"),
                             make_point_by_id(seg, "hi")) == Rat(1));
}

TEST_CASE("d_f dominates height difference and satisfies the triangle inequality") {
  CorpusSpec spec;
  spec.count = 12;
  spec.kind = GraphKind::Reeb;
  spec.seed = 47;
  spec.node_budget = 7;
  for (const auto& g : generate_corpus(spec)) {
    int n = int(g.nodes.size());
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back(make_node_point(g, i));
    std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = path_height_distance(g, pts[i], pts[j]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(d[i][j] >= (g.nodes[i].h - g.nodes[j].h).abs());
        CHECK(d[i][j] == d[j][i]);
        for (int k = 0; k < n; ++k) CHECK(d[i][j] <= d[i][k] + d[k][j]);
      }
  }
}

TEST_CASE("site matrix agrees with pairwise d_f, serial and parallel") {
  CorpusSpec spec;
  spec.count = 8;
  spec.kind = GraphKind::Reeb;
  spec.seed = 13;
  for (const auto& g : generate_corpus(spec)) {
    std::vector<Point> sites;
    for (int i = 0; i < int(g.nodes.size()); ++i)
      sites.push_back(make_node_point(g, i));
    for (int e = 0; e < int(g.edges.size()); ++e) {
      Interval s = g.edge_span(e);
      sites.push_back(make_edge_point(g, e, mid(s.lo, s.hi)));
    }
    auto serial = site_distance_matrix_serial(g, sites);
    set_parallel_enabled(true);
    auto par = site_distance_matrix(g, sites);
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = 0; j < sites.size(); ++j) {
        CHECK(serial[i][j] == par[i][j]);
        CHECK(serial[i][j] == path_height_distance(g, sites[i], sites[j]));
      }
  }
}

TEST_CASE("component keys are stable and order independent") {
  auto f = fixtures::cycle_f();
  auto p1 = interlevel_components(f, Interval(Rat(-1), Rat(1)));
  auto p2 = interlevel_components(f, Interval(Rat(-3, 2), Rat(3, 2)));
  REQUIRE(p1.count() == 2);
  REQUIRE(p2.count() == 2);
  // same member sets (the two arcs), so keys coincide across queries
  CHECK(p1.components[0] == p2.components[0]);
  CHECK(p1.components[1] == p2.components[1]);
  CHECK(p1.components[0].stable_id() == p2.components[0].stable_id());
  CHECK(p1.components[0].stable_id() != p1.components[1].stable_id());
}
