#include "reeb/fixtures.hpp"

namespace reeb::fixtures {

ReebGraph cycle_f() {
  ReebGraph g;
  g.name = "cycle";
  g.nodes.push_back({"a", Rat(-2)});
  g.nodes.push_back({"b", Rat(2)});
  g.edges.push_back({0, 1});  // arc sigma1
  g.edges.push_back({0, 1});  // arc sigma2
  g.reindex();
  return g;
}

ReebGraph segment_g() {
  ReebGraph g;
  g.name = "segment";
  g.nodes.push_back({"p", Rat(-2)});
  g.nodes.push_back({"q", Rat(2)});
  g.edges.push_back({0, 1});  // tau
  g.reindex();
  return g;
}

DistortionPair cycle_segment_pair() {
  ReebGraph F = cycle_f(), G = segment_g();
  DistortionPair pair;
  pair.delta = Rat(1);
  // phi: the level-preserving map, both arcs onto tau
  pair.phi.vertex_image = {make_node_point(G, 0), make_node_point(G, 1)};
  for (int e = 0; e < 2; ++e) {
    RouteStep st;
    st.s0 = Rat(-2);
    st.s1 = Rat(2);
    st.tedge = 0;
    st.t0 = Rat(-2);
    st.t1 = Rat(2);
    pair.phi.routes.push_back({st});
  }
  // psi: level-preserving into the first arc
  pair.psi.vertex_image = {make_node_point(F, 0), make_node_point(F, 1)};
  RouteStep st;
  st.s0 = Rat(-2);
  st.s1 = Rat(2);
  st.tedge = 0;
  st.t0 = Rat(-2);
  st.t1 = Rat(2);
  pair.psi.routes.push_back({st});
  return pair;
}

ReebGraph tailed_cycle_f() {
  ReebGraph g;
  g.name = "tailed-cycle";
  g.nodes.push_back({"bot", Rat(-3)});
  g.nodes.push_back({"v", Rat(-2)});
  g.nodes.push_back({"w", Rat(2)});
  g.nodes.push_back({"top", Rat(3)});
  g.edges.push_back({0, 1});  // tail below
  g.edges.push_back({1, 2});  // arc through x
  g.edges.push_back({1, 2});  // arc through z
  g.edges.push_back({2, 3});  // tail above
  g.reindex();
  return g;
}

Point tailed_cycle_x() { return make_edge_point(tailed_cycle_f(), 1, Rat(0)); }
Point tailed_cycle_z() { return make_edge_point(tailed_cycle_f(), 2, Rat(0)); }

ReebGraph long_segment_g() {
  ReebGraph g;
  g.name = "long-segment";
  g.nodes.push_back({"p", Rat(-3)});
  g.nodes.push_back({"q", Rat(3)});
  g.edges.push_back({0, 1});
  g.reindex();
  return g;
}

Point long_segment_y() { return make_edge_point(long_segment_g(), 0, Rat(0)); }

DistortionPair tailed_pair() {
  ReebGraph F = tailed_cycle_f(), G = long_segment_g();
  DistortionPair pair;
  pair.delta = Rat(1);
  // phi: level-preserving, both arcs onto the segment; phi(x) = y
  pair.phi.vertex_image = {make_node_point(G, 0), make_edge_point(G, 0, Rat(-2)),
                           make_edge_point(G, 0, Rat(2)), make_node_point(G, 1)};
  auto lp = [&](const Rat& a, const Rat& b) {
    RouteStep st;
    st.s0 = a;
    st.s1 = b;
    st.tedge = 0;
    st.t0 = a;
    st.t1 = b;
    return std::vector<RouteStep>{st};
  };
  pair.phi.routes = {lp(Rat(-3), Rat(-2)), lp(Rat(-2), Rat(2)),
                     lp(Rat(-2), Rat(2)), lp(Rat(2), Rat(3))};
  // psi: level-preserving onto the path through the z-arc; psi(y) = z
  pair.psi.vertex_image = {make_node_point(F, 0), make_node_point(F, 3)};
  RouteStep s1, s2, s3;
  s1.s0 = Rat(-3);
  s1.s1 = Rat(-2);
  s1.tedge = 0;
  s1.t0 = Rat(-3);
  s1.t1 = Rat(-2);
  s2.s0 = Rat(-2);
  s2.s1 = Rat(2);
  s2.tedge = 2;  // the z-arc
  s2.t0 = Rat(-2);
  s2.t1 = Rat(2);
  s3.s0 = Rat(2);
  s3.s1 = Rat(3);
  s3.tedge = 3;
  s3.t0 = Rat(2);
  s3.t1 = Rat(3);
  pair.psi.routes = {{s1, s2, s3}};
  return pair;
}

ReebGraph m1() {
  ReebGraph g;
  g.name = "m1";
  g.nodes.push_back({"l1", Rat(0)});
  g.nodes.push_back({"l2", Rat(1)});
  g.nodes.push_back({"r", Rat(3)});
  g.edges.push_back({0, 2});
  g.edges.push_back({1, 2});
  g.reindex();
  return g;
}

ReebGraph m1_upside_down() {
  ReebGraph g;
  g.name = "m1-upside-down";
  g.nodes.push_back({"r", Rat(0)});
  g.nodes.push_back({"l2", Rat(2)});
  g.nodes.push_back({"l1", Rat(3)});
  g.edges.push_back({0, 2});
  g.edges.push_back({0, 1});
  g.reindex();
  return g;
}

ReebGraph segment(const Rat& lo, const Rat& hi, const std::string& name) {
  ReebGraph g;
  g.name = name.empty() ? "segment" : name;
  g.nodes.push_back({"lo", lo});
  g.nodes.push_back({"hi", hi});
  g.edges.push_back({0, 1});
  g.reindex();
  return g;
}

}  // namespace reeb::fixtures
