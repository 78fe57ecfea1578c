#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "reeb/certificates.hpp"
#include "reeb/corpus.hpp"
#include "reeb/fixtures.hpp"
#include "reeb/smoothing.hpp"

using namespace reeb;

namespace {

// full-window interleaving: every assignment is the whole other graph; valid
// once delta is at least the trivial bound
InterleavingPair trivial_interleaving(const ReebGraph& F, const ReebGraph& G,
                                      const Rat& delta) {
  InterleavingPair p;
  p.delta = delta;
  std::vector<Rat> grid;
  for (const Rat& c : critical_heights(F)) grid.push_back(c);
  for (const Rat& c : critical_heights(G)) grid.push_back(c);
  std::vector<Rat> shifted;
  for (const Rat& c : grid)
    for (const Rat& s :
         {-(delta + delta), -delta, Rat(0), delta, delta + delta})
      shifted.push_back(c + s);
  p.grid = shifted;
  auto assign = [&](const ReebGraph& A, const ReebGraph& B,
                    std::vector<InterleavingPair::Assignment>& out) {
    Subdivision SA = subdivide(A, p.grid);
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point at = SA.to_old(A, make_node_point(SA.graph, v));
      Interval w = Interval::around(point_height(A, at), delta);
      auto part = interlevel_components(B, w);
      if (part.count() != 1) continue;  // leaves the assignment missing
      out.push_back({at, part.components[0]});
    }
  };
  assign(F, G, p.phi);
  assign(G, F, p.psi);
  return p;
}

Rat trivial_delta(const ReebGraph& F, const ReebGraph& G) {
  return max(F.max_height() - G.min_height(), G.max_height() - F.min_height());
}

}  // namespace

TEST_CASE("identity pair verifies at delta 0 for both verifiers") {
  auto g = fixtures::tailed_cycle_f();
  DistortionPair d{Rat(0), identity_plmap(g), identity_plmap(g)};
  CHECK(verify_distortion(g, g, d).accepted);
  ContortionPair c{Rat(0), identity_plmap(g), identity_plmap(g)};
  CHECK(verify_contortion(g, g, c).accepted);
}

TEST_CASE("appendix pair is a 1-distortion") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  CHECK(verify_distortion(F, G, pair).accepted);
}

TEST_CASE("appendix pair rejected at delta 1/4 with a metric witness") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  pair.delta = Rat(1, 4);
  Verdict v = verify_distortion(F, G, pair);
  CHECK(!v.accepted);
  CHECK(v.witness.find("metric distortion") != std::string::npos);
}

TEST_CASE("figure-1 pair: 1-distortion but not a 1-contortion") {
  auto F = fixtures::tailed_cycle_f();
  auto G = fixtures::long_segment_g();
  auto pair = fixtures::tailed_pair();
  CHECK(verify_distortion(F, G, pair).accepted);
  ContortionPair c{pair.delta, pair.phi, pair.psi};
  Verdict v = verify_contortion(F, G, c);
  CHECK(!v.accepted);
  // the witness names the failing window [-1, 1]
  CHECK(v.witness.find("[-1, 1]") != std::string::npos);
}

TEST_CASE("fixture contortion pair at delta 2 is accepted") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  ContortionPair c{Rat(2), pair.phi, pair.psi};
  CHECK(verify_contortion(F, G, c).accepted);
}

TEST_CASE("malformed maps raise before verification") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  pair.phi.routes[0].clear();
  CHECK_THROWS_AS(verify_distortion(F, G, pair), std::invalid_argument);
}

TEST_CASE("verifier symmetry under swapping the sides") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  DistortionPair swapped{pair.delta, pair.psi, pair.phi};
  CHECK(verify_distortion(F, G, pair).accepted ==
        verify_distortion(G, F, swapped).accepted);
  ContortionPair c{Rat(2), pair.phi, pair.psi};
  ContortionPair cs{Rat(2), pair.psi, pair.phi};
  CHECK(verify_contortion(F, G, c).accepted ==
        verify_contortion(G, F, cs).accepted);
}

TEST_CASE("verifier monotonicity in delta on the fixture pair") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  for (const Rat& d : {Rat(1), Rat(3, 2), Rat(2), Rat(4)}) {
    DistortionPair at{d, pair.phi, pair.psi};
    CHECK(verify_distortion(F, G, at).accepted);
  }
}

TEST_CASE("interleaving: identity-style pair at delta 0") {
  auto g = fixtures::m1();
  InterleavingPair p;
  p.delta = Rat(0);
  p.grid = critical_heights(g);
  Subdivision S = subdivide(g, p.grid);
  for (int v = 0; v < int(S.graph.nodes.size()); ++v) {
    Point at = S.to_old(g, make_node_point(S.graph, v));
    Interval w = Interval::around(point_height(g, at), Rat(0));
    auto part = interlevel_components(g, w);
    int c = part.component_of(g, at);
    REQUIRE(c >= 0);
    p.phi.push_back({at, part.components[c]});
    p.psi.push_back({at, part.components[c]});
  }
  CHECK(verify_interleaving(g, g, p).accepted);
}

TEST_CASE("interleaving: segments [0,1] and [0,3]") {
  auto F = fixtures::segment(Rat(0), Rat(1), "F");
  auto G = fixtures::segment(Rat(0), Rat(3), "G");
  SUBCASE("delta 2 accepted") {
    auto p = trivial_interleaving(F, G, Rat(2));
    CHECK(verify_interleaving(F, G, p).accepted);
  }
  SUBCASE("delta 1 rejected: top of G has empty window in F") {
    auto p = trivial_interleaving(F, G, Rat(1));
    Verdict v = verify_interleaving(F, G, p);
    CHECK(!v.accepted);
    CHECK(v.witness.find("missing assignment") != std::string::npos);
  }
  SUBCASE("coarse grid raises") {
    auto p = trivial_interleaving(F, G, Rat(2));
    p.grid = {Rat(0), Rat(3)};
    CHECK_THROWS_WITH_AS(verify_interleaving(F, G, p),
                         "grid must contain shifted critical heights",
                         std::invalid_argument);
  }
}

TEST_CASE("interleaving continuity rejects split assignments") {
  // map the whole cycle into one arc's component but flip components between
  // adjacent grid vertices: monotone-path continuity must fail
  auto F = fixtures::segment(Rat(-2), Rat(2), "F");
  auto G = fixtures::cycle_f();
  Rat delta(1, 2);
  InterleavingPair p;
  p.delta = delta;
  std::vector<Rat> grid;
  for (const Rat& c : {Rat(-2), Rat(2)})
    for (const Rat& s : {-(delta + delta), -delta, Rat(0), delta, delta + delta})
      grid.push_back(c + s);
  p.grid = grid;
  Subdivision SF = subdivide(F, grid);
  Subdivision SG = subdivide(G, grid);
  bool flip = false;
  for (int v = 0; v < int(SF.graph.nodes.size()); ++v) {
    Point at = SF.to_old(F, make_node_point(SF.graph, v));
    Interval w = Interval::around(point_height(F, at), delta);
    auto part = interlevel_components(G, w);
    int pick = part.count() > 1 ? (flip ? 1 : 0) : 0;
    flip = !flip;
    p.phi.push_back({at, part.components[pick]});
  }
  for (int v = 0; v < int(SG.graph.nodes.size()); ++v) {
    Point at = SG.to_old(G, make_node_point(SG.graph, v));
    Interval w = Interval::around(point_height(G, at), delta);
    auto part = interlevel_components(F, w);
    p.psi.push_back({at, part.components[0]});
  }
  Verdict v = verify_interleaving(F, G, p);
  CHECK(!v.accepted);
}

TEST_CASE("coupling: identity witness") {
  auto F = fixtures::tailed_cycle_f();
  Coupling c;
  c.delta = Rat(0);
  c.z = graph_as_complex(F);
  for (const auto& vert : c.z.vertices) {
    c.f_hat.push_back(vert.h);
    c.g_hat.push_back(vert.h);
  }
  auto r = reeb_of(c.z);
  auto bij_f = is_isomorphic(r.graph, F);
  REQUIRE(bij_f.has_value());
  c.iso_f = *bij_f;
  c.iso_g = *bij_f;
  Verdict v = verify_coupling(F, F, c);
  CHECK(v.accepted);
  CHECK(v.measured == Rat(0));
}

TEST_CASE("coupling: shift witness") {
  auto F = fixtures::m1();
  ReebGraph G = F;
  for (auto& n : G.nodes) n.h = n.h + Rat(1, 2);
  G.reindex();
  Coupling c;
  c.delta = Rat(1, 2);
  c.z = graph_as_complex(F);
  for (const auto& vert : c.z.vertices) {
    c.f_hat.push_back(vert.h);
    c.g_hat.push_back(vert.h + Rat(1, 2));
  }
  auto rf = reeb_of(c.z, c.f_hat);
  auto rg = reeb_of(c.z, c.g_hat);
  auto bf = is_isomorphic(rf.graph, F);
  auto bg = is_isomorphic(rg.graph, G);
  REQUIRE(bf.has_value());
  REQUIRE(bg.has_value());
  c.iso_f = *bf;
  c.iso_g = *bg;
  Verdict v = verify_coupling(F, G, c);
  CHECK(v.accepted);
  CHECK(v.measured == Rat(1, 2));
}

TEST_CASE("coupling: false isomorphism claims are rejected") {
  auto F = fixtures::m1();
  Coupling c;
  c.delta = Rat(0);
  c.z = graph_as_complex(F);
  for (const auto& vert : c.z.vertices) {
    c.f_hat.push_back(vert.h);
    c.g_hat.push_back(vert.h);
  }
  auto r = reeb_of(c.z);
  auto bij = is_isomorphic(r.graph, F);
  REQUIRE(bij.has_value());
  c.iso_f = *bij;
  c.iso_g = *bij;
  std::swap(c.iso_g[0].second, c.iso_g[1].second);  // break the bijection
  Verdict v = verify_coupling(F, F, c);
  CHECK(!v.accepted);
}

TEST_CASE("coupling: stability witness on random function pairs") {
  // identity coupling of (R(X,f), R(X,g)) verifies with sup-norm equal to
  // the max vertex difference
  CorpusSpec spec;
  spec.count = 6;
  spec.kind = GraphKind::Reeb;
  spec.seed = 14;
  SplitMix64 rng(99);
  for (const auto& g : generate_corpus(spec)) {
    Complex2 x = graph_as_complex(g);
    std::vector<Rat> f_hat, g_hat;
    for (const auto& vert : x.vertices) {
      f_hat.push_back(vert.h);
      long wiggle = long(rng.below(5)) - 2;
      g_hat.push_back(vert.h + Rat(wiggle, 4));
    }
    auto rf = reeb_of(x, f_hat);
    auto rg = reeb_of(x, g_hat);
    Coupling c;
    c.z = x;
    c.f_hat = f_hat;
    c.g_hat = g_hat;
    Rat sup(0);
    for (std::size_t i = 0; i < f_hat.size(); ++i)
      sup = max(sup, (f_hat[i] - g_hat[i]).abs());
    c.delta = sup;
    auto bf = is_isomorphic(rf.graph, rf.graph);
    auto bg = is_isomorphic(rg.graph, rg.graph);
    REQUIRE(bf.has_value());
    REQUIRE(bg.has_value());
    c.iso_f = *bf;
    c.iso_g = *bg;
    Verdict v = verify_coupling(rf.graph, rg.graph, c);
    CHECK(v.accepted);
    CHECK(v.measured == sup);
  }
}
