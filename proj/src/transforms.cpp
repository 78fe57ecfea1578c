#include "reeb/transforms.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

Rat default_epsilon(const ReebGraph& F, const ReebGraph& G) {
  std::vector<Rat> hs = critical_heights(F);
  for (const Rat& h : critical_heights(G)) hs.push_back(h);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  if (hs.size() < 2) return Rat(1, 4);
  Rat gap = hs[1] - hs[0];
  for (std::size_t i = 1; i + 1 < hs.size(); ++i)
    gap = min(gap, hs[i + 1] - hs[i]);
  return gap / Rat(4);
}

namespace {

void require_accepted(const Verdict& v, const char* what) {
  if (!v.accepted)
    throw std::invalid_argument(std::string(what) +
                                " requires a verified input: " + v.witness);
}

std::vector<Rat> sorted_unique(std::vector<Rat> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// ---------------------------------------------------------------------------
// coupling assembler over a pair of subdivided graphs; squares are gathered
// first and emitted once, so strips and full squares never fight over
// diagonals

struct Assembler {
  const ReebGraph& F;
  const ReebGraph& G;
  Complex2 z;
  std::vector<Rat> f_hat, g_hat;
  std::map<std::pair<int, int>, int> vmap;
  std::map<std::pair<int, int>, int> quarter_mask;  // 1 bottom,2 right,4 top,8 left
  std::set<std::pair<int, int>> rule_squares;
  std::map<std::pair<int, int>, std::set<int>> chord_marks;  // 0 = rising, 1 = falling

  Assembler(const ReebGraph& f, const ReebGraph& g) : F(f), G(g) { z.reindex(); }

  int vertex(int fn, int gn) {
    auto it = vmap.find({fn, gn});
    if (it != vmap.end()) return it->second;
    int v = z.add_vertex(F.nodes[fn].id + "|" + G.nodes[gn].id, F.nodes[fn].h);
    f_hat.push_back(F.nodes[fn].h);
    g_hat.push_back(G.nodes[gn].h);
    vmap[{fn, gn}] = v;
    return v;
  }

  void edge_fg(int fe, int gn) {  // F-edge x G-node
    z.add_edge(vertex(F.edges[fe].lower, gn), vertex(F.edges[fe].upper, gn));
  }
  void edge_gf(int fn, int ge) {  // F-node x G-edge
    z.add_edge(vertex(fn, G.edges[ge].lower), vertex(fn, G.edges[ge].upper));
  }

  void square_full(int fe, int ge) { rule_squares.insert({fe, ge}); }
  void cover_quarters(int fe, int ge, int mask) { quarter_mask[{fe, ge}] |= mask; }
  void chord(int fe, int ge, int which) { chord_marks[{fe, ge}].insert(which); }

  void product(const SubgraphCells& fs, const SubgraphCells& gs) {
    std::set<int> fnodes(fs.nodes.begin(), fs.nodes.end());
    std::set<int> gnodes(gs.nodes.begin(), gs.nodes.end());
    for (int e : fs.edges) {
      fnodes.insert(F.edges[e].lower);
      fnodes.insert(F.edges[e].upper);
    }
    for (int e : gs.edges) {
      gnodes.insert(G.edges[e].lower);
      gnodes.insert(G.edges[e].upper);
    }
    for (int fn : fnodes)
      for (int gn : gnodes) vertex(fn, gn);
    for (int fe : fs.edges)
      for (int gn : gnodes) edge_fg(fe, gn);
    for (int ge : gs.edges)
      for (int fn : fnodes) edge_gf(fn, ge);
    for (int fe : fs.edges)
      for (int ge : gs.edges) square_full(fe, ge);
  }

  Coupling finish(const ReebGraph& origF, const ReebGraph& origG,
                  const Rat& claim) {
    emit_squares();
    auto viol = validate_complex(z);
    if (!viol.empty())
      throw std::logic_error("coupling construction invalid: " +
                             viol.front().message);
    Coupling c;
    c.delta = claim;
    c.z = z;
    c.f_hat = f_hat;
    c.g_hat = g_hat;
    auto rf = reeb_of(z, f_hat);
    auto rg = reeb_of(z, g_hat);
    auto bf = is_isomorphic(rf.graph, origF);
    auto bg = is_isomorphic(rg.graph, origG);
    if (!bf || !bg)
      throw std::logic_error(
          "coupling construction: quotient does not match the input graph");
    c.iso_f = *bf;
    c.iso_g = *bg;
    return c;
  }

 private:
  int center(int fe, int ge) {
    const auto& EF = F.edges[fe];
    const auto& EG = G.edges[ge];
    std::string id = "c|" + F.nodes[EF.lower].id + "^" + F.nodes[EF.upper].id +
                     "|" + G.nodes[EG.lower].id + "^" + G.nodes[EG.upper].id;
    int i = z.vertex_index(id);
    if (i >= 0) return i;
    Rat fh = mid(F.nodes[EF.lower].h, F.nodes[EF.upper].h);
    int v = z.add_vertex(id, fh);
    f_hat.push_back(fh);
    g_hat.push_back(mid(G.nodes[EG.lower].h, G.nodes[EG.upper].h));
    return v;
  }

  void emit_rule_square(int fe, int ge) {
    int a0 = vertex(F.edges[fe].lower, G.edges[ge].lower);
    int b0 = vertex(F.edges[fe].upper, G.edges[ge].lower);
    int a1 = vertex(F.edges[fe].lower, G.edges[ge].upper);
    int b1 = vertex(F.edges[fe].upper, G.edges[ge].upper);
    auto idp = [&](int u, int v) {
      std::string iu = z.vertices[u].id, iv = z.vertices[v].id;
      if (iv < iu) std::swap(iu, iv);
      return iu + "\x01" + iv;
    };
    if (idp(a0, b1) <= idp(b0, a1)) {
      z.add_triangle(a0, b0, b1);
      z.add_triangle(a0, a1, b1);
    } else {
      z.add_triangle(a0, b0, a1);
      z.add_triangle(b0, a1, b1);
    }
  }

  void emit_centered(int fe, int ge, int mask, const std::set<int>& chords) {
    // materialize only the corners actually used, so chords do not leave
    // isolated vertices behind
    auto a0 = [&] { return vertex(F.edges[fe].lower, G.edges[ge].lower); };
    auto b0 = [&] { return vertex(F.edges[fe].upper, G.edges[ge].lower); };
    auto a1 = [&] { return vertex(F.edges[fe].lower, G.edges[ge].upper); };
    auto b1 = [&] { return vertex(F.edges[fe].upper, G.edges[ge].upper); };
    int c = center(fe, ge);
    if (mask & 1) z.add_triangle(a0(), b0(), c);  // g-lower side
    if (mask & 2) z.add_triangle(b0(), b1(), c);  // f-upper side
    if (mask & 4) z.add_triangle(a1(), b1(), c);  // g-upper side
    if (mask & 8) z.add_triangle(a0(), a1(), c);  // f-lower side
    for (int ch : chords) {
      if (ch == 0) {  // rising diagonal a0 - b1 through the center
        z.add_edge(a0(), c);
        z.add_edge(c, b1());
      } else {  // falling diagonal b0 - a1
        z.add_edge(b0(), c);
        z.add_edge(c, a1());
      }
    }
  }

  void emit_squares() {
    std::set<std::pair<int, int>> centered;
    for (auto& [sq, m] : quarter_mask) centered.insert(sq);
    for (auto& [sq, cs] : chord_marks) centered.insert(sq);
    for (auto& sq : rule_squares)
      if (!centered.count(sq)) emit_rule_square(sq.first, sq.second);
    for (auto& sq : centered) {
      int mask = 0;
      auto it = quarter_mask.find(sq);
      if (it != quarter_mask.end()) mask = it->second;
      if (rule_squares.count(sq)) mask = 15;
      emit_centered(sq.first, sq.second, mask,
                    chord_marks.count(sq) ? chord_marks.at(sq) : std::set<int>{});
    }
  }
};

// ---------------------------------------------------------------------------
// cells of the subdivided graph covering an interlevel component of the
// original graph, clipped to the window (window bounds must be subdivision
// values so member fragments are unions of whole cells)

SubgraphCells clip_component(const ReebGraph& orig, const Subdivision& S,
                             const ComponentKey& key, const Interval& window) {
  std::set<int> nodes, edges;
  for (int n : key.nodes) {
    Point p = S.to_new(orig, make_node_point(orig, n));
    nodes.insert(p.node);
  }
  for (int e : key.edges) {
    Rat lo = max(orig.nodes[orig.edges[e].lower].h, window.lo);
    Rat hi = min(orig.nodes[orig.edges[e].upper].h, window.hi);
    for (int se = 0; se < int(S.graph.edges.size()); ++se) {
      if (S.edge_origin[se] != e) continue;
      Interval s = S.graph.edge_span(se);
      if (lo <= s.lo && s.hi <= hi) {
        edges.insert(se);
        nodes.insert(S.graph.edges[se].lower);
        nodes.insert(S.graph.edges[se].upper);
      }
    }
  }
  SubgraphCells out;
  out.nodes.assign(nodes.begin(), nodes.end());
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

// a canonical interior point of a member element of a component, clipped to
// the window (used to locate the component inside a wider window)
Point member_point(const ReebGraph& g, const ComponentKey& key,
                   const Interval& window) {
  if (!key.nodes.empty()) return make_node_point(g, key.nodes.front());
  int e = key.edges.front();
  Rat lo = max(g.nodes[g.edges[e].lower].h, window.lo);
  Rat hi = min(g.nodes[g.edges[e].upper].h, window.hi);
  if (lo == hi) return make_edge_point(g, e, lo);
  // strictly interior when possible
  if (lo > g.nodes[g.edges[e].lower].h) return make_edge_point(g, e, lo);
  return make_edge_point(g, e, mid(lo, hi));
}

// image of a whole-cell subgraph of the subdivided source under a map whose
// step targets are aligned to the subdivided target
SubgraphCells image_cells(const ReebGraph& srcSub, const ReebGraph& dstOrig,
                          const Subdivision& dstSub, const PLMap& m,
                          const SubgraphCells& part) {
  std::set<int> nodes, edges;
  auto add_point = [&](const Point& pOrig) {
    Point p = dstSub.to_new(dstOrig, pOrig);
    if (!p.is_node())
      throw std::logic_error("image point is not aligned to the grid");
    nodes.insert(p.node);
  };
  auto add_fragment = [&](int ge_orig, const Rat& lo, const Rat& hi) {
    for (int e = 0; e < int(dstSub.graph.edges.size()); ++e) {
      if (dstSub.edge_origin[e] != ge_orig) continue;
      Interval s = dstSub.graph.edge_span(e);
      if (lo <= s.lo && s.hi <= hi) {
        edges.insert(e);
        nodes.insert(dstSub.graph.edges[e].lower);
        nodes.insert(dstSub.graph.edges[e].upper);
      }
    }
  };
  for (int n : part.nodes) add_point(m.vertex_image[n]);
  for (int e : part.edges)
    for (const auto& st : m.routes[e]) {
      if (st.stay)
        add_point(st.at);
      else
        add_fragment(st.tedge, min(st.t0, st.t1), max(st.t0, st.t1));
    }
  SubgraphCells out;
  out.nodes.assign(nodes.begin(), nodes.end());
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

// shortest walk between two points inside one component of an interlevel
// preimage; element-level BFS
Walk window_walk(const ReebGraph& g, const Interval& window, const Point& from,
                 const Point& to) {
  Walk w;
  w.start = from;
  w.end = to;
  if (from == to) return w;
  if (!from.is_node() && !to.is_node() && from.edge == to.edge) {
    w.steps.push_back({from.edge, from.h, to.h});
    return w;
  }
  int N = int(g.nodes.size());
  auto node_in = [&](int v) { return window.contains(g.nodes[v].h); };
  std::vector<int> parent(N, -2), via(N, -1);
  std::queue<int> q;
  auto seed = [&](int v) {
    if (node_in(v) && parent[v] == -2) {
      parent[v] = -1;
      q.push(v);
    }
  };
  std::vector<int> from_anchors, to_anchors;
  if (from.is_node())
    from_anchors = {from.node};
  else
    from_anchors = {g.edges[from.edge].lower, g.edges[from.edge].upper};
  if (to.is_node())
    to_anchors = {to.node};
  else
    to_anchors = {g.edges[to.edge].lower, g.edges[to.edge].upper};
  for (int a : from_anchors) seed(a);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    auto relax = [&](int e, int u) {
      if (!node_in(u) || parent[u] != -2) return;
      parent[u] = v;
      via[u] = e;
      q.push(u);
    };
    for (int e : g.up_edges(v)) relax(e, g.edges[e].upper);
    for (int e : g.down_edges(v)) relax(e, g.edges[e].lower);
  }
  for (int target : to_anchors) {
    if (parent[target] == -2) continue;
    std::vector<std::pair<int, int>> rev;
    int v = target;
    while (v != -1) {
      rev.push_back({v, via[v]});
      v = parent[v];
    }
    std::reverse(rev.begin(), rev.end());
    Walk cand;
    cand.start = from;
    cand.end = to;
    if (!from.is_node())
      cand.steps.push_back({from.edge, from.h, g.nodes[rev.front().first].h});
    for (std::size_t i = 1; i < rev.size(); ++i)
      cand.steps.push_back(
          {rev[i].second, g.nodes[rev[i - 1].first].h, g.nodes[rev[i].first].h});
    if (!to.is_node())
      cand.steps.push_back({to.edge, g.nodes[target].h, to.h});
    std::vector<WalkStep> steps;
    for (auto& s : cand.steps)
      if (s.from_h != s.to_h) steps.push_back(s);
    cand.steps = std::move(steps);
    return cand;
  }
  throw std::logic_error("window_walk: endpoints not connected in the window");
}

std::vector<RouteStep> walk_to_route(const Walk& w, const Rat& s0, const Rat& s1) {
  std::vector<RouteStep> out;
  if (w.steps.empty()) {
    RouteStep st;
    st.s0 = s0;
    st.s1 = s1;
    st.stay = true;
    st.at = w.start;
    out.push_back(st);
    return out;
  }
  int k = int(w.steps.size());
  Rat width = s1 - s0;
  for (int i = 0; i < k; ++i) {
    RouteStep st;
    st.s0 = s0 + width * Rat(i) / Rat(k);
    st.s1 = s0 + width * Rat(i + 1) / Rat(k);
    st.tedge = w.steps[i].edge;
    st.t0 = w.steps[i].from_h;
    st.t1 = w.steps[i].to_h;
    out.push_back(st);
  }
  return out;
}

std::vector<RouteStep> tidy_route(std::vector<RouteStep> route) {
  std::vector<RouteStep> out;
  for (auto& st : route) {
    if (st.s0 == st.s1) continue;
    if (!out.empty() && out.back().stay && st.stay && out.back().at == st.at) {
      out.back().s1 = st.s1;
      continue;
    }
    out.push_back(st);
  }
  return out;
}

// at delta 0 a verified pair forces the two graphs isomorphic; the witness
// space is the diagonal
Coupling diagonal_coupling(const ReebGraph& F, const ReebGraph& G) {
  Coupling c;
  c.delta = Rat(0);
  c.z = graph_as_complex(F);
  for (const auto& v : c.z.vertices) {
    c.f_hat.push_back(v.h);
    c.g_hat.push_back(v.h);
  }
  auto r = reeb_of(c.z);
  auto bf = is_isomorphic(r.graph, F);
  auto bg = is_isomorphic(r.graph, G);
  if (!bf || !bg)
    throw std::logic_error("diagonal coupling: graphs are not isomorphic");
  c.iso_f = *bf;
  c.iso_g = *bg;
  return c;
}

// equal splits making every edge span at most `width`
std::vector<Rat> fine_cuts(const ReebGraph& g, const Rat& width) {
  std::vector<Rat> cuts;
  if (!(width > Rat(0))) return cuts;
  for (int e = 0; e < int(g.edges.size()); ++e) {
    Interval span = g.edge_span(e);
    Rat w = span.width();
    long k = 1;
    while (w / Rat(k) > width) ++k;
    for (long j = 1; j < k; ++j) cuts.push_back(span.lo + w * Rat(j) / Rat(k));
  }
  return cuts;
}

}  // namespace

// ---------------------------------------------------------------------------

DistortionPair contortion_as_distortion(const ReebGraph& F, const ReebGraph& G,
                                        const ContortionPair& pair) {
  require_accepted(verify_contortion(F, G, pair), "contortion_as_distortion");
  return DistortionPair{pair.delta, pair.phi, pair.psi};
}

// ---------------------------------------------------------------------------

Coupling distortion_to_coupling(const ReebGraph& F, const ReebGraph& G,
                                const DistortionPair& pair) {
  require_accepted(verify_distortion(F, G, pair), "distortion_to_coupling");
  const Rat& d = pair.delta;
  if (d == Rat(0)) return diagonal_coupling(F, G);
  Rat two_d = d + d;

  std::vector<Rat> lamF = critical_heights(F);
  std::vector<Rat> lamG = critical_heights(G);
  for (const Rat& h : fine_cuts(F, two_d)) lamF.push_back(h);
  for (const Rat& h : fine_cuts(G, two_d)) lamG.push_back(h);
  for (const Rat& h : image_breakpoint_heights(F, pair.psi)) lamF.push_back(h);
  for (const Rat& h : image_breakpoint_heights(G, pair.phi)) lamG.push_back(h);
  for (int e = 0; e < int(F.edges.size()); ++e)
    for (const Rat& b : route_breakpoints(pair.phi, e)) lamF.push_back(b);
  for (int e = 0; e < int(G.edges.size()); ++e)
    for (const Rat& b : route_breakpoints(pair.psi, e)) lamG.push_back(b);

  // window bottoms for the K(x) pieces: the minimal connecting interval of
  // (x, psi(phi(x))) widened to exactly 2 delta
  auto window_values = [&](const ReebGraph& A, const ReebGraph& B,
                           const PLMap& ab, const PLMap& ba,
                           std::vector<Rat>& lamA) {
    Subdivision SA = subdivide(A, sorted_unique(lamA));
    std::vector<Rat> add;
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point x = SA.to_old(A, make_node_point(SA.graph, v));
      Point y = plmap_eval(A, B, ab, x);
      Point back = plmap_eval(B, A, ba, y);
      add.push_back(point_height(A, back));
      auto [w, iv] = path_height_distance_interval(A, x, back);
      add.push_back(iv.lo);
      add.push_back(iv.lo + two_d);
    }
    for (const Rat& h : add) lamA.push_back(h);
  };
  window_values(F, G, pair.phi, pair.psi, lamF);
  window_values(G, F, pair.psi, pair.phi, lamG);

  Subdivision SF = subdivide(F, sorted_unique(lamF));
  Subdivision SG = subdivide(G, sorted_unique(lamG));
  PLMap phiS = restrict_to_subdivision(F, G, pair.phi, SF);
  PLMap psiS = restrict_to_subdivision(G, F, pair.psi, SG);

  Assembler a(SF.graph, SG.graph);

  auto side = [&](const ReebGraph& A, const Subdivision& SA, const ReebGraph& B,
                  const Subdivision& SB, const PLMap& abS, const PLMap& ab,
                  const PLMap& ba, bool swapped) {
    std::set<std::pair<std::pair<Rat, Rat>, std::uint64_t>> piece_done;
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point x = SA.to_old(A, make_node_point(SA.graph, v));
      Point y = plmap_eval(A, B, ab, x);
      Point back = plmap_eval(B, A, ba, y);
      auto [w, iv] = path_height_distance_interval(A, x, back);
      Interval window(iv.lo, iv.lo + two_d);
      auto part = interlevel_components(A, window);
      int comp = part.component_of(A, x);
      if (comp < 0) throw std::logic_error("rep outside its own window");
      auto key = std::make_pair(std::make_pair(window.lo, window.hi),
                                part.components[comp].stable_id());
      if (!piece_done.insert(key).second) continue;
      SubgraphCells K = clip_component(A, SA, part.components[comp], window);
      SubgraphCells img = image_cells(SA.graph, B, SB, abS, K);
      if (!swapped)
        a.product(K, img);
      else
        a.product(img, K);
    }
    // cell pieces keep the projection onto A surjective
    for (int e = 0; e < int(SA.graph.edges.size()); ++e) {
      SubgraphCells c;
      c.edges = {e};
      c.nodes = {SA.graph.edges[e].lower, SA.graph.edges[e].upper};
      SubgraphCells img = image_cells(SA.graph, B, SB, abS, c);
      if (!swapped)
        a.product(c, img);
      else
        a.product(img, c);
    }
  };
  side(F, SF, G, SG, phiS, pair.phi, pair.psi, false);
  side(G, SG, F, SF, psiS, pair.psi, pair.phi, true);

  return a.finish(F, G, two_d + d);
}

// ---------------------------------------------------------------------------

namespace {

struct AssignmentTable {
  std::vector<const ComponentKey*> at_vertex;  // per grid-subdivided vertex

  AssignmentTable(const ReebGraph& A, const Subdivision& SA,
                  const std::vector<InterleavingPair::Assignment>& as) {
    at_vertex.assign(SA.graph.nodes.size(), nullptr);
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point orig = SA.to_old(A, make_node_point(SA.graph, v));
      for (const auto& asg : as)
        if (asg.at == orig) {
          at_vertex[v] = &asg.component;
          break;
        }
    }
    for (auto* k : at_vertex)
      if (!k) throw std::logic_error("interleaving assignment missing");
  }
};

}  // namespace

Coupling interleaving_to_coupling(const ReebGraph& F, const ReebGraph& G,
                                  const InterleavingPair& pair) {
  require_accepted(verify_interleaving(F, G, pair), "interleaving_to_coupling");
  const Rat& d = pair.delta;
  if (d == Rat(0)) return diagonal_coupling(F, G);
  Rat two_d = d + d;

  std::vector<Rat> base = pair.grid;
  for (const Rat& c : critical_heights(F)) base.push_back(c);
  for (const Rat& c : critical_heights(G)) base.push_back(c);
  for (const Rat& c : fine_cuts(F, two_d)) base.push_back(c);
  for (const Rat& c : fine_cuts(G, two_d)) base.push_back(c);
  std::vector<Rat> widened;
  for (const Rat& c : base)
    for (const Rat& s : {-(two_d + d), -two_d, -d, Rat(0), d, two_d, two_d + d})
      widened.push_back(c + s);
  std::vector<Rat> lam = sorted_unique(widened);

  Subdivision SF = subdivide(F, lam);
  Subdivision SG = subdivide(G, lam);
  Subdivision SFgrid = subdivide(F, pair.grid);
  Subdivision SGgrid = subdivide(G, pair.grid);
  AssignmentTable phiT(F, SFgrid, pair.phi);
  AssignmentTable psiT(G, SGgrid, pair.psi);
  SmoothedGraph smF = smooth(F, d), smG = smooth(G, d);

  Assembler a(SF.graph, SG.graph);

  auto side = [&](const ReebGraph& A, const Subdivision& SA,
                  const Subdivision& SAgrid, const ReebGraph& B,
                  const Subdivision& SB, const AssignmentTable& tab,
                  const SmoothedGraph& smB, bool swapped) {
    // the window component crossed by the map over an interior height: the
    // arc reachable from the enclosing grid cell's two assignments
    auto arc_key_at = [&](const Rat& h, const Point& orig_interior) -> ComponentKey {
      Point ongrid = SAgrid.to_new(A, orig_interior);
      if (ongrid.is_node()) return *tab.at_vertex[ongrid.node];
      int gcell = ongrid.edge;
      int glo = SAgrid.graph.edges[gcell].lower;
      int ghi = SAgrid.graph.edges[gcell].upper;
      Point Plo = smB.point_for(SAgrid.graph.nodes[glo].h, *tab.at_vertex[glo]);
      Point Phi = smB.point_for(SAgrid.graph.nodes[ghi].h, *tab.at_vertex[ghi]);
      auto part = interlevel_components(B, Interval::around(h, d));
      for (int c = 0; c < part.count(); ++c) {
        Point Pc = smB.point_for(h, part.components[c]);
        if (smB.monotone_path_exists(Plo, Pc) &&
            smB.monotone_path_exists(Pc, Phi))
          return part.components[c];
      }
      throw std::logic_error("no arc joins the assigned components");
    };

    // vertex pieces: C(x) x Phi(C(x)) at grid vertices
    for (int v = 0; v < int(SAgrid.graph.nodes.size()); ++v) {
      Point x = SAgrid.to_old(A, make_node_point(SAgrid.graph, v));
      const Rat& fx = point_height(A, x);
      Interval cw = Interval::around(fx, two_d);
      auto partA = interlevel_components(A, cw);
      int comp = partA.component_of(A, x);
      if (comp < 0) throw std::logic_error("vertex outside its 2-delta window");
      const ComponentKey& keyA = partA.components[comp];
      SubgraphCells C = clip_component(A, SA, keyA, cw);

      std::set<int> inodes, iedges;
      auto add_cells = [&](const SubgraphCells& sc) {
        inodes.insert(sc.nodes.begin(), sc.nodes.end());
        iedges.insert(sc.edges.begin(), sc.edges.end());
      };
      // assignments at grid vertices inside C(x)
      for (int v2 = 0; v2 < int(SAgrid.graph.nodes.size()); ++v2) {
        Point x2 = SAgrid.to_old(A, make_node_point(SAgrid.graph, v2));
        const Rat& fx2 = point_height(A, x2);
        if (!cw.contains(fx2)) continue;
        bool inside = x2.is_node() ? keyA.contains_node(x2.node)
                                   : keyA.contains_edge(x2.edge);
        if (!inside) continue;
        add_cells(clip_component(B, SB, *tab.at_vertex[v2],
                                 Interval::around(fx2, d)));
      }
      // arc completion over fine cells inside C(x)
      for (int se = 0; se < int(SA.graph.edges.size()); ++se) {
        Interval ss = SA.graph.edge_span(se);
        if (!cw.contains(ss.lo) || !cw.contains(ss.hi)) continue;
        Point orig =
            SA.to_old(A, make_edge_point(SA.graph, se, mid(ss.lo, ss.hi)));
        if (orig.is_node() || !keyA.contains_edge(orig.edge)) continue;
        Interval ww(ss.lo - d, ss.hi + d);
        ComponentKey arc = arc_key_at(mid(ss.lo, ss.hi), orig);
        Point probe = member_point(B, arc, Interval::around(mid(ss.lo, ss.hi), d));
        auto partB = interlevel_components(B, ww);
        int wc = partB.component_of(B, probe);
        if (wc < 0) throw std::logic_error("arc completion lookup failed");
        add_cells(clip_component(B, SB, partB.components[wc], ww));
      }
      SubgraphCells img;
      img.nodes.assign(inodes.begin(), inodes.end());
      img.edges.assign(iedges.begin(), iedges.end());
      if (img.empty()) continue;
      if (!swapped)
        a.product(C, img);
      else
        a.product(img, C);
    }
    // cell pieces: fine cell x its connecting window component
    for (int se = 0; se < int(SA.graph.edges.size()); ++se) {
      Interval ss = SA.graph.edge_span(se);
      Point orig = SA.to_old(A, make_edge_point(SA.graph, se, mid(ss.lo, ss.hi)));
      Interval ww(ss.lo - d, ss.hi + d);
      ComponentKey arc = arc_key_at(mid(ss.lo, ss.hi), orig);
      Point probe = member_point(B, arc, Interval::around(mid(ss.lo, ss.hi), d));
      auto partB = interlevel_components(B, ww);
      int wc = partB.component_of(B, probe);
      if (wc < 0) throw std::logic_error("cell window lookup failed");
      SubgraphCells W = clip_component(B, SB, partB.components[wc], ww);
      SubgraphCells c;
      c.edges = {se};
      c.nodes = {SA.graph.edges[se].lower, SA.graph.edges[se].upper};
      if (W.empty()) continue;
      if (!swapped)
        a.product(c, W);
      else
        a.product(W, c);
    }
  };
  side(F, SF, SFgrid, G, SG, phiT, smG, false);
  side(G, SG, SGgrid, F, SF, psiT, smF, true);

  return a.finish(F, G, two_d + two_d + d);
}

// ---------------------------------------------------------------------------

ContortionPair interleaving_to_contortion_general(const ReebGraph& F,
                                                  const ReebGraph& G,
                                                  const InterleavingPair& pair,
                                                  const Rat& eps) {
  require_accepted(verify_interleaving(F, G, pair),
                   "interleaving_to_contortion_general");
  if (!(eps > Rat(0))) throw std::invalid_argument("eps must be positive");
  const Rat& d = pair.delta;

  SmoothedGraph smF = smooth(F, d), smG = smooth(G, d);
  Subdivision SFgrid = subdivide(F, pair.grid);
  Subdivision SGgrid = subdivide(G, pair.grid);
  AssignmentTable phiT(F, SFgrid, pair.phi);
  AssignmentTable psiT(G, SGgrid, pair.psi);

  auto build = [&](const ReebGraph& A, const Subdivision& SAgrid,
                   const ReebGraph& B, const SmoothedGraph& smB,
                   const AssignmentTable& tab) -> PLMap {
    // samples: refine every grid cell into spans < eps
    std::vector<Rat> sample_grid = pair.grid;
    for (int e = 0; e < int(SAgrid.graph.edges.size()); ++e) {
      Interval span = SAgrid.graph.edge_span(e);
      Rat width = span.width();
      long k = 1;
      while (width / Rat(k) >= eps) ++k;
      for (long j = 1; j < k; ++j)
        sample_grid.push_back(span.lo + width * Rat(j) / Rat(k));
    }
    Subdivision SA = subdivide(A, sorted_unique(sample_grid));

    auto least_point = [&](const ComponentKey& key, const Interval& w) -> Point {
      return member_point(B, key, w);
    };

    std::vector<Point> mu(SA.graph.nodes.size());
    std::vector<ComponentKey> interior_keys(SA.graph.nodes.size());
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point orig = SA.to_old(A, make_node_point(SA.graph, v));
      Point ongrid = SAgrid.to_new(A, orig);
      const Rat& h = point_height(A, orig);
      Interval w = Interval::around(h, d);
      if (ongrid.is_node()) {
        mu[v] = least_point(*tab.at_vertex[ongrid.node], w);
        continue;
      }
      // interior sample: the arc component joining the two cell assignments
      int gcell = ongrid.edge;
      int glo = SAgrid.graph.edges[gcell].lower;
      int ghi = SAgrid.graph.edges[gcell].upper;
      Point Plo = smB.point_for(SAgrid.graph.nodes[glo].h, *tab.at_vertex[glo]);
      Point Phi = smB.point_for(SAgrid.graph.nodes[ghi].h, *tab.at_vertex[ghi]);
      auto part = interlevel_components(B, w);
      bool chosen = false;
      for (int c = 0; c < part.count() && !chosen; ++c) {
        Point Pc = smB.point_for(h, part.components[c]);
        if (smB.monotone_path_exists(Plo, Pc) &&
            smB.monotone_path_exists(Pc, Phi)) {
          interior_keys[v] = part.components[c];
          mu[v] = least_point(part.components[c], w);
          chosen = true;
        }
      }
      if (!chosen)
        throw std::logic_error("no arc joins the assigned components");
    }

    PLMap out;
    out.vertex_image.resize(A.nodes.size());
    for (int v = 0; v < int(A.nodes.size()); ++v) out.vertex_image[v] = mu[v];
    out.routes.resize(A.edges.size());
    for (int se = 0; se < int(SA.graph.edges.size()); ++se) {
      int lo = SA.graph.edges[se].lower, hi = SA.graph.edges[se].upper;
      Interval span = SA.graph.edge_span(se);
      Interval K(span.lo - d, span.hi + d);
      Walk wk = window_walk(B, K, mu[lo], mu[hi]);
      for (auto& st : tidy_route(walk_to_route(wk, span.lo, span.hi)))
        out.routes[SA.edge_origin[se]].push_back(st);
    }
    for (auto& route : out.routes) {
      std::sort(route.begin(), route.end(), [](const RouteStep& x, const RouteStep& y) {
        return x.s0 < y.s0;
      });
      route = tidy_route(route);
    }
    return out;
  };

  ContortionPair out;
  out.delta = d + d + d + eps + eps + eps;
  out.phi = build(F, SFgrid, G, smG, phiT);
  out.psi = build(G, SGgrid, F, smF, psiT);
  return out;
}

// ---------------------------------------------------------------------------

ContortionPair interleaving_to_contortion_merge(const ReebGraph& F,
                                                const ReebGraph& G,
                                                const InterleavingPair& pair) {
  if (!is_merge_tree(F) || !is_merge_tree(G))
    throw std::invalid_argument(
        "interleaving_to_contortion_merge requires merge trees");
  require_accepted(verify_interleaving(F, G, pair),
                   "interleaving_to_contortion_merge");
  const Rat& d = pair.delta;
  KappaDelta kdG = kappa_delta(G, d);
  KappaDelta kdF = kappa_delta(F, d);

  auto build = [&](const ReebGraph& A, const ReebGraph& B, const KappaDelta& kd,
                   const std::vector<InterleavingPair::Assignment>& as) -> PLMap {
    Rat kink = B.max_height() - d;
    std::vector<Rat> grid = pair.grid;
    grid.push_back(kink);
    Subdivision SA = subdivide(A, sorted_unique(grid));
    Subdivision SAgrid = subdivide(A, pair.grid);
    AssignmentTable tab(A, SAgrid, as);
    const Rat& m_B = B.max_height();

    auto image_at = [&](int v) -> Point {
      Point orig = SA.to_old(A, make_node_point(SA.graph, v));
      Point ongrid = SAgrid.to_new(A, orig);
      const Rat& h = point_height(A, orig);
      Point sm;
      if (ongrid.is_node()) {
        sm = kd.smoothing.point_for(h, *tab.at_vertex[ongrid.node]);
      } else {
        // the kink vertex: in a merge tree the ascent from the cell's lower
        // assignment is unique
        int gcell = ongrid.edge;
        int glo = SAgrid.graph.edges[gcell].lower;
        Point Plo = kd.smoothing.point_for(SAgrid.graph.nodes[glo].h,
                                           *tab.at_vertex[glo]);
        sm = kd.smoothing.ascend_unique(Plo, h);
      }
      return kd.apply_rho(sm);
    };

    std::vector<Point> img(SA.graph.nodes.size());
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) img[v] = image_at(v);

    PLMap m;
    m.vertex_image.resize(A.nodes.size());
    for (int v = 0; v < int(A.nodes.size()); ++v) m.vertex_image[v] = img[v];
    m.routes.resize(A.edges.size());
    for (int se = 0; se < int(SA.graph.edges.size()); ++se) {
      int lo = SA.graph.edges[se].lower, hi = SA.graph.edges[se].upper;
      Interval span = SA.graph.edge_span(se);
      std::vector<RouteStep> steps;
      if (span.lo + d >= m_B) {
        RouteStep st;
        st.s0 = span.lo;
        st.s1 = span.hi;
        st.stay = true;
        st.at = img[lo];
        steps.push_back(st);
      } else {
        // rising at slope one along the unique ascent in B
        Rat s_end = min(span.hi, m_B - d);
        Point cur = img[lo];
        Rat s_cur = span.lo;
        while (s_cur < s_end) {
          int edge;
          Rat from_h = point_height(B, cur);
          if (cur.is_node()) {
            const auto& ups = B.up_edges(cur.node);
            if (ups.empty())
              throw std::logic_error("ascent hit the root below the cap");
            edge = ups[0];
          } else {
            edge = cur.edge;
          }
          Rat to_h = min(B.nodes[B.edges[edge].upper].h, s_end + d);
          RouteStep st;
          st.s0 = s_cur;
          st.s1 = to_h - d;
          st.tedge = edge;
          st.t0 = from_h;
          st.t1 = to_h;
          steps.push_back(st);
          s_cur = st.s1;
          cur = make_edge_point(B, edge, to_h);
        }
        if (s_end < span.hi) {
          RouteStep st;
          st.s0 = s_end;
          st.s1 = span.hi;
          st.stay = true;
          st.at = img[hi];
          steps.push_back(st);
        }
      }
      for (auto& st : tidy_route(std::move(steps)))
        m.routes[SA.edge_origin[se]].push_back(st);
    }
    for (auto& route : m.routes) {
      std::sort(route.begin(), route.end(), [](const RouteStep& x, const RouteStep& y) {
        return x.s0 < y.s0;
      });
      route = tidy_route(route);
    }
    return m;
  };

  ContortionPair out;
  out.delta = d;
  out.phi = build(F, G, kdG, pair.phi);
  out.psi = build(G, F, kdF, pair.psi);
  return out;
}

// ---------------------------------------------------------------------------

ContortionPair coupling_to_contortion(const ReebGraph& F, const ReebGraph& G,
                                      const Coupling& c, const Rat& eps) {
  Verdict cv = verify_coupling(F, G, c);
  require_accepted(cv, "coupling_to_contortion");
  if (!(eps > Rat(0))) throw std::invalid_argument("eps must be positive");
  const Rat measured = cv.measured;

  auto eps_cuts = [&](const ReebGraph& A) {
    std::vector<Rat> cuts = critical_heights(A);
    for (int e = 0; e < int(A.edges.size()); ++e) {
      Interval span = A.edge_span(e);
      Rat width = span.width();
      long k = 1;
      while (width / Rat(k) > eps) ++k;
      for (long j = 1; j < k; ++j)
        cuts.push_back(span.lo + width * Rat(j) / Rat(k));
    }
    return sorted_unique(cuts);
  };
  std::vector<Rat> levelsF = eps_cuts(F);
  std::vector<Rat> levelsG = eps_cuts(G);
  Subdivision SF = subdivide(F, levelsF);
  Subdivision SG = subdivide(G, levelsG);

  auto sub1 = subdivide_complex_at_levels(c.z, c.f_hat, {c.g_hat}, levelsF);
  auto sub2 = subdivide_complex_at_levels(sub1.complex, sub1.carries[0],
                                          {sub1.values}, levelsG);
  const Complex2& Z = sub2.complex;
  const std::vector<Rat>& g_val = sub2.values;
  const std::vector<Rat>& f_val = sub2.carries[0];

  ReebOfResult RF = reeb_of(Z, f_val);
  ReebOfResult RG = reeb_of(Z, g_val);
  auto bijF = is_isomorphic(RF.graph, F);
  auto bijG = is_isomorphic(RG.graph, G);
  if (!bijF || !bijG)
    throw std::logic_error("coupling quotients changed under subdivision");

  // quotient points translated into the target graph through the computed
  // isomorphism; parallel edges are paired in index order (interchangeable
  // by an automorphism)
  struct Translate {
    const ReebGraph& quot;
    const ReebGraph& target;
    Canonicalization canonT;
    std::map<std::string, int> node_map;
    std::map<int, int> edge_map;

    Translate(const ReebGraph& q, const ReebGraph& t,
              const std::vector<std::pair<std::string, std::string>>& bij)
        : quot(q), target(t), canonT(canonicalize(t)) {
      std::map<std::string, int> canon_index;
      for (int i = 0; i < int(canonT.graph.nodes.size()); ++i)
        canon_index[canonT.graph.nodes[i].id] = i;
      for (auto& [a, b] : bij) node_map[a] = canon_index.at(b);
      std::map<std::pair<int, int>, std::vector<int>> q_groups, t_groups;
      for (int e = 0; e < int(quot.edges.size()); ++e)
        q_groups[{node_map.at(quot.nodes[quot.edges[e].lower].id),
                  node_map.at(quot.nodes[quot.edges[e].upper].id)}]
            .push_back(e);
      for (int e = 0; e < int(canonT.graph.edges.size()); ++e)
        t_groups[{canonT.graph.edges[e].lower, canonT.graph.edges[e].upper}]
            .push_back(e);
      for (auto& [k, qs] : q_groups) {
        auto& ts = t_groups.at(k);
        if (ts.size() != qs.size())
          throw std::logic_error("edge multiplicity mismatch in translation");
        for (std::size_t i = 0; i < qs.size(); ++i) edge_map[qs[i]] = ts[i];
      }
    }

    Point to_target(const Point& p) const {
      if (p.is_node()) {
        int cn = node_map.at(quot.nodes[p.node].id);
        return canonT.to_old(target, make_node_point(canonT.graph, cn));
      }
      Point cp = make_edge_point(canonT.graph, edge_map.at(p.edge), p.h);
      return canonT.to_old(target, cp);
    }
  };
  Translate TF(RF.graph, F, *bijF);
  Translate TG(RG.graph, G, *bijG);

  int NV = int(Z.vertices.size()), NE = int(Z.edges.size());
  std::vector<Point> vF(NV), vG(NV);
  for (int i = 0; i < NV; ++i) {
    vF[i] = TF.to_target(RF.map.vertex_image[i]);
    vG[i] = TG.to_target(RG.map.vertex_image[i]);
  }
  struct EdgeImage {
    bool flat = false;
    Point at;
    int tedge = -1;
    Rat lo, hi;
  };
  auto edge_images = [&](const ReebOfResult& R, const Translate& T,
                         const std::vector<Rat>& val) {
    std::vector<EdgeImage> out(NE);
    for (int e = 0; e < NE; ++e) {
      int a = Z.edges[e][0], b = Z.edges[e][1];
      if (val[a] == val[b]) {
        out[e].flat = true;
        out[e].at = T.to_target(R.map.flat_edge_image[e]);
        continue;
      }
      Rat lo = min(val[a], val[b]), hi = max(val[a], val[b]);
      Point sample = T.to_target(R.map.edge_point_image(R.graph, e, mid(lo, hi)));
      if (sample.is_node())
        throw std::logic_error("edge image midpoint is a node");
      out[e].tedge = sample.edge;
      out[e].lo = lo;
      out[e].hi = hi;
    }
    return out;
  };
  std::vector<EdgeImage> eF = edge_images(RF, TF, f_val);
  std::vector<EdgeImage> eG = edge_images(RG, TG, g_val);

  auto build = [&](const ReebGraph& A, const Subdivision& SA, const ReebGraph& B,
                   const std::vector<Point>& vA, const std::vector<Point>& vB,
                   const std::vector<EdgeImage>& eA,
                   const std::vector<EdgeImage>& eB) -> PLMap {
    auto pt_on_cell = [&](const Point& pA, int cell) -> bool {
      Point p = SA.to_new(A, pA);
      if (p.is_node())
        return SA.graph.edges[cell].lower == p.node ||
               SA.graph.edges[cell].upper == p.node;
      return p.edge == cell;
    };
    auto frag_in_cell = [&](const EdgeImage& im, int cell) -> bool {
      if (im.flat) return pt_on_cell(im.at, cell);
      Interval span = SA.graph.edge_span(cell);
      Point pmid = SA.to_new(A, make_edge_point(A, im.tedge, mid(im.lo, im.hi)));
      return !pmid.is_node() && pmid.edge == cell && span.lo <= im.lo &&
             im.hi <= span.hi;
    };
    auto pt_is = [&](const Point& pA, const Point& sA) { return pA == sA; };

    auto phi_at = [&](const Point& sA) -> Point {
      std::vector<Point> candidates;
      for (int i = 0; i < NV; ++i)
        if (pt_is(vA[i], sA)) candidates.push_back(vB[i]);
      for (int e = 0; e < NE; ++e) {
        if (!eA[e].flat || !(eA[e].at == sA)) continue;
        if (eB[e].flat)
          candidates.push_back(eB[e].at);
        else {
          candidates.push_back(make_edge_point(B, eB[e].tedge, eB[e].lo));
          candidates.push_back(make_edge_point(B, eB[e].tedge, eB[e].hi));
        }
      }
      if (candidates.empty())
        throw std::logic_error("empty fiber image at a sample vertex");
      Point best = candidates[0];
      for (const Point& p : candidates)
        if (point_less(B, p, best)) best = p;
      return best;
    };

    std::vector<Point> mu(SA.graph.nodes.size());
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v)
      mu[v] = phi_at(SA.to_old(A, make_node_point(SA.graph, v)));

    PLMap m;
    m.vertex_image.resize(A.nodes.size());
    for (int v = 0; v < int(A.nodes.size()); ++v) m.vertex_image[v] = mu[v];
    m.routes.resize(A.edges.size());

    for (int cell = 0; cell < int(SA.graph.edges.size()); ++cell) {
      // J: B-images of the z elements over the closed cell
      struct El {
        bool is_node;
        int node = -1;
        int edge = -1;
        Interval range{Rat(0), Rat(0)};
      };
      std::vector<El> els;
      std::set<int> jnodes;
      auto add_b_point = [&](const Point& p) {
        if (p.is_node())
          jnodes.insert(p.node);
        else
          els.push_back({false, -1, p.edge, Interval(p.h, p.h)});
      };
      for (int i = 0; i < NV; ++i)
        if (pt_on_cell(vA[i], cell)) add_b_point(vB[i]);
      for (int e = 0; e < NE; ++e) {
        if (!frag_in_cell(eA[e], cell)) continue;
        if (eB[e].flat)
          add_b_point(eB[e].at);
        else
          els.push_back({false, -1, eB[e].tedge, Interval(eB[e].lo, eB[e].hi)});
      }
      for (int n : jnodes) els.push_back({true, n, -1, Interval(Rat(0), Rat(0))});

      int n_els = int(els.size());
      auto touches = [&](const El& x, const El& y) -> bool {
        auto node_on_frag = [&](int node, const El& fr) {
          const auto& ed = B.edges[fr.edge];
          if (ed.lower == node && fr.range.contains(B.nodes[node].h)) return true;
          if (ed.upper == node && fr.range.contains(B.nodes[node].h)) return true;
          return false;
        };
        if (x.is_node && y.is_node) return false;
        if (x.is_node) return node_on_frag(x.node, y);
        if (y.is_node) return node_on_frag(y.node, x);
        if (x.edge == y.edge)
          return !(x.range.hi < y.range.lo || y.range.hi < x.range.lo);
        // fragments on different edges meet at a shared endpoint node
        for (int na : {B.edges[x.edge].lower, B.edges[x.edge].upper})
          for (int nb : {B.edges[y.edge].lower, B.edges[y.edge].upper})
            if (na == nb && x.range.contains(B.nodes[na].h) &&
                y.range.contains(B.nodes[nb].h))
              return true;
        return false;
      };
      std::vector<std::vector<int>> adj(n_els);
      for (int i = 0; i < n_els; ++i)
        for (int j = i + 1; j < n_els; ++j)
          if (touches(els[i], els[j])) {
            adj[i].push_back(j);
            adj[j].push_back(i);
          }
      int lo = SA.graph.edges[cell].lower, hi = SA.graph.edges[cell].upper;
      auto locate = [&](const Point& p) -> int {
        for (int i = 0; i < n_els; ++i) {
          if (p.is_node() && els[i].is_node && els[i].node == p.node) return i;
          if (!p.is_node() && !els[i].is_node && els[i].edge == p.edge &&
              els[i].range.contains(p.h))
            return i;
        }
        return -1;
      };
      int si = locate(mu[lo]), ti = locate(mu[hi]);
      if (si < 0 || ti < 0)
        throw std::logic_error("sample image is not inside its fiber image set");
      std::vector<int> par(n_els, -2);
      std::queue<int> bfs;
      par[si] = -1;
      bfs.push(si);
      while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int w : adj[u])
          if (par[w] == -2) {
            par[w] = u;
            bfs.push(w);
          }
      }
      if (par[ti] == -2)
        throw std::logic_error("fiber image set is not connected over a cell");
      std::vector<int> path;
      for (int u = ti; u != -1; u = par[u]) path.push_back(u);
      std::reverse(path.begin(), path.end());

      Walk wk;
      wk.start = mu[lo];
      wk.end = mu[hi];
      Point cur = mu[lo];
      auto meet_point = [&](const El& x, const El& y) -> Point {
        if (x.is_node) return make_node_point(B, x.node);
        if (y.is_node) return make_node_point(B, y.node);
        if (x.edge == y.edge) {
          Rat a = max(x.range.lo, y.range.lo);
          return make_edge_point(B, x.edge, a);
        }
        for (int na : {B.edges[x.edge].lower, B.edges[x.edge].upper})
          for (int nb : {B.edges[y.edge].lower, B.edges[y.edge].upper})
            if (na == nb && x.range.contains(B.nodes[na].h) &&
                y.range.contains(B.nodes[nb].h))
              return make_node_point(B, na);
        throw std::logic_error("adjacent elements share no point");
      };
      auto advance = [&](const El& along, const Point& to) {
        Rat a = point_height(B, cur);
        Rat b = point_height(B, to);
        if (!along.is_node && a != b) wk.steps.push_back({along.edge, a, b});
        cur = to;
      };
      for (std::size_t i = 0; i + 1 < path.size(); ++i)
        advance(els[path[i]], meet_point(els[path[i]], els[path[i + 1]]));
      advance(els[path.back()], mu[hi]);

      Interval span = SA.graph.edge_span(cell);
      for (auto& st : tidy_route(walk_to_route(wk, span.lo, span.hi)))
        m.routes[SA.edge_origin[cell]].push_back(st);
    }
    for (auto& route : m.routes) {
      std::sort(route.begin(), route.end(), [](const RouteStep& x, const RouteStep& y) {
        return x.s0 < y.s0;
      });
      route = tidy_route(route);
    }
    return m;
  };

  ContortionPair out;
  out.delta = measured + eps + eps;
  out.phi = build(F, SF, G, vF, vG, eF, eG);
  out.psi = build(G, SG, F, vG, vF, eG, eF);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct AlignedMaps {
  Subdivision SF, SG;
  PLMap phi, psi;
};

// subdivide both graphs until every route step maps one cell onto one cell
// (or stays at a vertex); shift-style maps stabilize after a few rounds
AlignedMaps align_pair(const ReebGraph& F, const ReebGraph& G,
                       const PLMap& phi0, const PLMap& psi0) {
  std::vector<Rat> lamF = critical_heights(F);
  std::vector<Rat> lamG = critical_heights(G);
  for (const Rat& h : image_breakpoint_heights(F, psi0)) lamF.push_back(h);
  for (const Rat& h : image_breakpoint_heights(G, phi0)) lamG.push_back(h);
  for (int e = 0; e < int(F.edges.size()); ++e)
    for (const Rat& b : route_breakpoints(phi0, e)) lamF.push_back(b);
  for (int e = 0; e < int(G.edges.size()); ++e)
    for (const Rat& b : route_breakpoints(psi0, e)) lamG.push_back(b);
  lamF = sorted_unique(lamF);
  lamG = sorted_unique(lamG);

  for (int round = 0; round < 32; ++round) {
    Subdivision SF = subdivide(F, lamF);
    Subdivision SG = subdivide(G, lamG);
    PLMap phi = restrict_to_subdivision(F, G, phi0, SF);
    PLMap psi = restrict_to_subdivision(G, F, psi0, SG);
    std::vector<Rat> newF, newG;
    auto scan = [](const ReebGraph& SRC, const ReebGraph& DSTORIG,
                   const std::vector<Rat>& lamDst, const PLMap& m,
                   std::vector<Rat>* srcAdd, std::vector<Rat>* dstAdd) {
      for (int e = 0; e < int(SRC.edges.size()); ++e)
        for (const auto& st : m.routes[e]) {
          if (st.stay) {
            Rat h = point_height(DSTORIG, st.at);
            if (!std::binary_search(lamDst.begin(), lamDst.end(), h))
              dstAdd->push_back(h);
            continue;
          }
          Rat tlo = min(st.t0, st.t1), thi = max(st.t0, st.t1);
          if (!std::binary_search(lamDst.begin(), lamDst.end(), st.t0))
            dstAdd->push_back(st.t0);
          if (!std::binary_search(lamDst.begin(), lamDst.end(), st.t1))
            dstAdd->push_back(st.t1);
          for (const Rat& u : lamDst) {
            if (!(tlo < u && u < thi)) continue;
            Rat s = st.s0 + (u - st.t0) * (st.s1 - st.s0) / (st.t1 - st.t0);
            srcAdd->push_back(s);
          }
        }
    };
    scan(SF.graph, G, lamG, phi, &newF, &newG);
    scan(SG.graph, F, lamF, psi, &newG, &newF);
    std::vector<Rat> lamF2 = lamF, lamG2 = lamG;
    for (const Rat& h : newF) lamF2.push_back(h);
    for (const Rat& h : newG) lamG2.push_back(h);
    lamF2 = sorted_unique(lamF2);
    lamG2 = sorted_unique(lamG2);
    if (lamF2 == lamF && lamG2 == lamG) {
      AlignedMaps out;
      out.phi = retarget_to_subdivision(SF.graph, G, phi, SG);
      out.psi = retarget_to_subdivision(SG.graph, F, psi, SF);
      out.SF = std::move(SF);
      out.SG = std::move(SG);
      // post: every cell carries exactly one step, cell-onto-cell or a stay
      // at a vertex
      auto check = [](const ReebGraph& SRC, const ReebGraph& DST, const PLMap& m) {
        for (int e = 0; e < int(SRC.edges.size()); ++e) {
          if (m.routes[e].size() != 1)
            throw std::logic_error("alignment left a multi-step cell");
          const auto& st = m.routes[e][0];
          if (st.stay) {
            if (!st.at.is_node())
              throw std::logic_error("aligned stay target is not a vertex");
            continue;
          }
          Interval ts = DST.edge_span(st.tedge);
          if (!((min(st.t0, st.t1) == ts.lo) && (max(st.t0, st.t1) == ts.hi)))
            throw std::logic_error("aligned step is not cell-onto-cell");
        }
      };
      check(out.SF.graph, out.SG.graph, out.phi);
      check(out.SG.graph, out.SF.graph, out.psi);
      return out;
    }
    lamF = std::move(lamF2);
    lamG = std::move(lamG2);
  }
  throw std::invalid_argument(
      "contortion_to_coupling_contour: map alignment did not stabilize");
}

}  // namespace

Coupling contortion_to_coupling_contour(const ReebGraph& F, const ReebGraph& G,
                                        const ContortionPair& pair) {
  if (!is_contour_tree(F) || !is_contour_tree(G))
    throw std::invalid_argument(
        "contortion_to_coupling_contour requires contour trees");
  require_accepted(verify_contortion(F, G, pair),
                   "contortion_to_coupling_contour");

  AlignedMaps al = align_pair(F, G, pair.phi, pair.psi);
  const ReebGraph& SFg = al.SF.graph;
  const ReebGraph& SGg = al.SG.graph;
  Assembler a(SFg, SGg);

  // quarters covered by a half-square on one side of a diagonal; "above" is
  // in the value direction of the sweep, which is the G axis on the plain
  // side and the F axis on the swapped side (flipping the rising case)
  auto half_mask = [](bool rising_diag, bool above, bool swapped) -> int {
    if (!rising_diag) return above ? (4 | 2) : (1 | 8);
    return (above != swapped) ? (4 | 8) : (1 | 2);
  };

  auto add_vertex_geodesic = [&](int xn, const Walk& w, bool swapped) {
    for (const auto& st : w.steps) {
      if (!swapped)
        a.edge_gf(xn, st.edge);
      else
        a.edge_fg(st.edge, xn);
    }
    if (w.steps.empty() && w.start.is_node()) {
      if (!swapped)
        a.vertex(xn, w.start.node);
      else
        a.vertex(w.start.node, xn);
    }
  };

  auto side = [&](const ReebGraph& A, const ReebGraph& B, const PLMap& phi,
                  const PLMap& psi, bool swapped) {
    // vertex pieces: {x} x B(phi(x), y) over the partners of x
    for (int v = 0; v < int(A.nodes.size()); ++v) {
      Point x = make_node_point(A, v);
      Point a_img = phi.vertex_image[v];
      if (!a_img.is_node())
        throw std::logic_error("aligned vertex image is not a vertex");
      if (!swapped)
        a.vertex(v, a_img.node);
      else
        a.vertex(a_img.node, v);
      Preimage pre = plmap_preimage(B, A, psi, x);
      for (const Point& y : pre.points)
        add_vertex_geodesic(v, tree_geodesic(B, a_img, y), swapped);
      for (const auto& fr : pre.fragments) {
        Point near_lo = make_edge_point(B, fr.edge, fr.lo);
        add_vertex_geodesic(v, tree_geodesic(B, a_img, near_lo), swapped);
        if (!swapped)
          a.edge_gf(v, fr.edge);
        else
          a.edge_fg(fr.edge, v);
      }
    }
    // cell pieces
    for (int cell = 0; cell < int(A.edges.size()); ++cell) {
      Interval span = A.edge_span(cell);
      const RouteStep& pst = phi.routes[cell][0];
      // phi graph over the cell: the chord (or flat segment)
      if (pst.stay) {
        if (!swapped)
          a.edge_fg(cell, pst.at.node);
        else
          a.edge_gf(pst.at.node, cell);
      } else {
        bool rising = pst.t0 < pst.t1;
        if (!swapped)
          a.chord(cell, pst.tedge, rising ? 0 : 1);
        else
          a.chord(pst.tedge, cell, rising ? 0 : 1);
      }
      Point phi_mid =
          plmap_eval(A, B, phi, make_edge_point(A, cell, mid(span.lo, span.hi)));
      // partner families: psi steps traversing this cell
      for (int ge = 0; ge < int(B.edges.size()); ++ge) {
        const RouteStep& st = psi.routes[ge][0];
        if (st.stay) continue;  // handled at the vertex the stay maps to
        Point back = st.eval(A, mid(st.s0, st.s1));
        if (back.is_node() || back.edge != cell) continue;
        // partner curve endpoints over the cell
        Rat s_at_lo = st.s0 + (span.lo - st.t0) * (st.s1 - st.s0) / (st.t1 - st.t0);
        Rat s_at_hi = st.s0 + (span.hi - st.t0) * (st.s1 - st.s0) / (st.t1 - st.t0);
        Rat s_mid_v = mid(s_at_lo, s_at_hi);
        Point y_mid = make_edge_point(B, ge, s_mid_v);
        if (phi_mid == y_mid) {
          // the curves meet at the middle: either identical diagonals (the
          // chord already covers them) or a crossing pair (cover the bowtie)
          if (!pst.stay && pst.tedge == ge) {
            bool phi_rising = pst.t0 < pst.t1;
            bool psi_rising = s_at_lo < s_at_hi;
            if (phi_rising != psi_rising) {
              if (!swapped)
                a.cover_quarters(cell, ge, 2 | 8);
              else
                a.cover_quarters(ge, cell, 1 | 4);
            }
          }
          continue;
        }
        Walk w = tree_geodesic(B, phi_mid, y_mid);
        // interior whole cells swept along the geodesic
        for (const auto& ws : w.steps) {
          Interval es = B.edge_span(ws.edge);
          if (min(ws.from_h, ws.to_h) == es.lo && max(ws.from_h, ws.to_h) == es.hi) {
            if (!swapped)
              a.square_full(cell, ws.edge);
            else
              a.square_full(ws.edge, cell);
          }
        }
        // end strip at the phi side
        if (!pst.stay && !w.steps.empty() && w.steps.front().edge == pst.tedge) {
          const auto& first = w.steps.front();
          bool exit_upper = first.to_h > first.from_h;
          bool rising = pst.t0 < pst.t1;
          int mask = half_mask(rising, exit_upper, swapped);
          if (!swapped)
            a.cover_quarters(cell, pst.tedge, mask);
          else
            a.cover_quarters(pst.tedge, cell, mask);
        }
        // end strip at the partner side
        if (!w.steps.empty() && w.steps.back().edge == ge) {
          const auto& last = w.steps.back();
          bool enter_from_upper = last.from_h > last.to_h;
          bool rising = s_at_lo < s_at_hi;
          int mask = half_mask(rising, enter_from_upper, swapped);
          if (!swapped)
            a.cover_quarters(cell, ge, mask);
          else
            a.cover_quarters(ge, cell, mask);
        }
      }
    }
  };
  side(SFg, SGg, al.phi, al.psi, false);
  side(SGg, SFg, al.psi, al.phi, true);

  return a.finish(F, G, pair.delta);
}

}  // namespace reeb
