#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "reeb/corpus.hpp"
#include "reeb/fixtures.hpp"
#include "reeb/transforms.hpp"
#include "support/certs.hpp"

using namespace reeb;

TEST_CASE("contortion re-tags as distortion at the same delta") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto base = fixtures::cycle_segment_pair();
  ContortionPair c{Rat(2), base.phi, base.psi};
  REQUIRE(verify_contortion(F, G, c).accepted);
  DistortionPair d = contortion_as_distortion(F, G, c);
  CHECK(d.delta == Rat(2));
  CHECK(verify_distortion(F, G, d).accepted);

  ContortionPair bad{Rat(1), base.phi, base.psi};
  CHECK_THROWS_AS(contortion_as_distortion(F, G, bad), std::invalid_argument);
}

TEST_CASE("identity pair gives the diagonal coupling with sup 0") {
  auto g = fixtures::m1();
  DistortionPair id{Rat(0), identity_plmap(g), identity_plmap(g)};
  Coupling c = distortion_to_coupling(g, g, id);
  Verdict v = verify_coupling(g, g, c);
  CHECK(v.accepted);
  CHECK(v.measured == Rat(0));
}

TEST_CASE("appendix 1-distortion gives a coupling with sup-norm <= 3") {
  auto F = fixtures::cycle_f();
  auto G = fixtures::segment_g();
  auto pair = fixtures::cycle_segment_pair();
  Coupling c = distortion_to_coupling(F, G, pair);
  Verdict v = verify_coupling(F, G, c);
  CHECK(v.accepted);
  CHECK(v.measured <= Rat(3));
}

TEST_CASE("shift pair gives a coupling with sup-norm <= 3 shift") {
  auto F = fixtures::m1();
  ReebGraph G = F;
  for (auto& n : G.nodes) n.h = n.h + Rat(1, 2);
  G.reindex();
  DistortionPair pair = testsupport::shift_pair(F, G, Rat(1, 2));
  REQUIRE(verify_distortion(F, G, pair).accepted);
  Coupling c = distortion_to_coupling(F, G, pair);
  Verdict v = verify_coupling(F, G, c);
  CHECK(v.accepted);
  CHECK(v.measured <= Rat(3, 2));
}

TEST_CASE("interleaving to coupling: delta 0 identity and the segments pair") {
  SUBCASE("identity at delta 0") {
    auto g = fixtures::m1();
    auto p = testsupport::identity_interleaving(g);
    REQUIRE(verify_interleaving(g, g, p).accepted);
    Coupling c = interleaving_to_coupling(g, g, p);
    Verdict v = verify_coupling(g, g, c);
    CHECK(v.accepted);
    CHECK(v.measured == Rat(0));
  }
  SUBCASE("segments at delta 2: sup <= 10") {
    auto F = fixtures::segment(Rat(0), Rat(1), "F");
    auto G = fixtures::segment(Rat(0), Rat(3), "G");
    auto p = testsupport::trivial_interleaving(F, G, Rat(2));
    REQUIRE(verify_interleaving(F, G, p).accepted);
    Coupling c = interleaving_to_coupling(F, G, p);
    Verdict v = verify_coupling(F, G, c);
    CHECK(v.accepted);
    CHECK(v.measured <= Rat(10));
  }
}

TEST_CASE("interleaving to contortion (general): stated bounds hold") {
  SUBCASE("delta 0 accepted at 3 eps") {
    auto g = fixtures::m1();
    auto p = testsupport::identity_interleaving(g);
    Rat eps(1, 16);
    ContortionPair c = interleaving_to_contortion_general(g, g, p, eps);
    CHECK(c.delta == Rat(3, 16));
    CHECK(verify_contortion(g, g, c).accepted);
  }
  SUBCASE("segments at delta 2, eps 1/16") {
    auto F = fixtures::segment(Rat(0), Rat(1), "F");
    auto G = fixtures::segment(Rat(0), Rat(3), "G");
    auto p = testsupport::trivial_interleaving(F, G, Rat(2));
    Rat eps(1, 16);
    ContortionPair c = interleaving_to_contortion_general(F, G, p, eps);
    CHECK(c.delta == Rat(6) + Rat(3, 16));
    CHECK(verify_contortion(F, G, c).accepted);
  }
}

TEST_CASE("interleaving to contortion on merge trees keeps delta") {
  SUBCASE("segments at delta 2: the capped shift") {
    auto F = fixtures::segment(Rat(0), Rat(1), "F");
    auto G = fixtures::segment(Rat(0), Rat(3), "G");
    auto p = testsupport::trivial_interleaving(F, G, Rat(2));
    ContortionPair c = interleaving_to_contortion_merge(F, G, p);
    CHECK(c.delta == Rat(2));
    Point top = plmap_eval(F, G, c.phi, make_point_by_id(F, "hi"));
    CHECK(point_height(G, top) == Rat(3));
    Point img0 = plmap_eval(G, F, c.psi, make_point_by_id(G, "lo"));
    CHECK(point_height(F, img0) == Rat(1));
    Point img3 = plmap_eval(G, F, c.psi, make_point_by_id(G, "hi"));
    CHECK(point_height(F, img3) == Rat(1));
    CHECK(verify_contortion(F, G, c).accepted);
  }
  SUBCASE("identity at delta 0") {
    auto g = fixtures::m1();
    auto p = testsupport::identity_interleaving(g);
    ContortionPair c = interleaving_to_contortion_merge(g, g, p);
    CHECK(c.delta == Rat(0));
    CHECK(verify_contortion(g, g, c).accepted);
  }
  SUBCASE("non-merge-tree input throws") {
    auto f = fixtures::cycle_f();
    auto p = testsupport::identity_interleaving(f);
    CHECK_THROWS_AS(interleaving_to_contortion_merge(f, f, p),
                    std::invalid_argument);
  }
}

TEST_CASE("contour coupling from a contortion pair") {
  SUBCASE("identity pair on a tree: diagonal coupling, sup 0") {
    auto t = fixtures::m1();
    ContortionPair id{Rat(0), identity_plmap(t), identity_plmap(t)};
    Coupling c = contortion_to_coupling_contour(t, t, id);
    Verdict v = verify_coupling(t, t, c);
    CHECK(v.accepted);
    CHECK(v.measured == Rat(0));
  }
  SUBCASE("segments pipeline at delta 2: sup <= 2") {
    auto F = fixtures::segment(Rat(0), Rat(1), "F");
    auto G = fixtures::segment(Rat(0), Rat(3), "G");
    auto p = testsupport::trivial_interleaving(F, G, Rat(2));
    ContortionPair c = interleaving_to_contortion_merge(F, G, p);
    Coupling z = contortion_to_coupling_contour(F, G, c);
    Verdict v = verify_coupling(F, G, z);
    CHECK(v.accepted);
    CHECK(v.measured <= Rat(2));
  }
  SUBCASE("non-contour input throws") {
    auto f = fixtures::cycle_f();
    ContortionPair id{Rat(0), identity_plmap(f), identity_plmap(f)};
    CHECK_THROWS_AS(contortion_to_coupling_contour(f, f, id),
                    std::invalid_argument);
  }
}

TEST_CASE("coupling to contortion") {
  SUBCASE("identity coupling: accepted at 2 eps") {
    auto g = fixtures::m1();
    Coupling c = testsupport::identity_coupling(g);
    Rat eps(1, 8);
    ContortionPair pair = coupling_to_contortion(g, g, c, eps);
    CHECK(pair.delta == Rat(1, 4));
    CHECK(verify_contortion(g, g, pair).accepted);
  }
  SUBCASE("shift coupling: accepted at shift + 2 eps") {
    auto F = fixtures::segment(Rat(0), Rat(2), "F");
    ReebGraph G = F;
    for (auto& n : G.nodes) n.h = n.h + Rat(1, 2);
    G.reindex();
    Coupling c = testsupport::shift_coupling(F, G, Rat(1, 2));
    Rat eps(1, 8);
    ContortionPair pair = coupling_to_contortion(F, G, c, eps);
    CHECK(pair.delta == Rat(3, 4));
    CHECK(verify_contortion(F, G, pair).accepted);
  }
}

TEST_CASE("random verified couplings convert within delta + 2 eps") {
  CorpusSpec spec;
  spec.count = 5;
  spec.kind = GraphKind::Reeb;
  spec.seed = 40;
  spec.node_budget = 5;
  SplitMix64 rng(7);
  for (const auto& g : generate_corpus(spec)) {
    Complex2 x = graph_as_complex(g);
    std::vector<Rat> f_hat, g_hat;
    for (const auto& vert : x.vertices) {
      f_hat.push_back(vert.h);
      long wiggle = long(rng.below(3)) - 1;
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
    c.iso_f = *is_isomorphic(rf.graph, rf.graph);
    c.iso_g = *is_isomorphic(rg.graph, rg.graph);
    REQUIRE(verify_coupling(rf.graph, rg.graph, c).accepted);
    Rat eps = default_epsilon(rf.graph, rg.graph);
    ContortionPair pair = coupling_to_contortion(rf.graph, rg.graph, c, eps);
    CHECK(pair.delta == sup + eps + eps);
    CHECK(verify_contortion(rf.graph, rg.graph, pair).accepted);
  }
}

TEST_CASE("default epsilon is a quarter of the smallest critical gap") {
  auto F = fixtures::segment(Rat(0), Rat(1), "F");
  auto G = fixtures::segment(Rat(0), Rat(3), "G");
  CHECK(default_epsilon(F, G) == Rat(1, 4));
  auto m = fixtures::m1();  // gaps 1 and 2
  CHECK(default_epsilon(m, m) == Rat(1, 4));
}
