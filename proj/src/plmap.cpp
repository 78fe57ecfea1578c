#include "reeb/plmap.hpp"

#include <algorithm>
#include <stdexcept>

namespace reeb {

Point RouteStep::start(const ReebGraph& target) const {
  if (stay) return at;
  return make_edge_point(target, tedge, t0);
}

Point RouteStep::end(const ReebGraph& target) const {
  if (stay) return at;
  return make_edge_point(target, tedge, t1);
}

Point RouteStep::eval(const ReebGraph& target, const Rat& s) const {
  if (stay) return at;
  if (s == s0) return start(target);
  if (s == s1) return end(target);
  Rat t = t0 + (s - s0) * (t1 - t0) / (s1 - s0);
  return make_edge_point(target, tedge, t);
}

std::vector<Violation> validate_plmap(const ReebGraph& src, const ReebGraph& dst,
                                      const PLMap& m) {
  std::vector<Violation> out;
  if (m.vertex_image.size() != src.nodes.size())
    out.push_back({"vertex image count mismatch"});
  if (m.routes.size() != src.edges.size())
    out.push_back({"route count mismatch"});
  if (!out.empty()) return out;
  for (int e = 0; e < int(src.edges.size()); ++e) {
    const auto& route = m.routes[e];
    Interval span = src.edge_span(e);
    if (route.empty()) {
      out.push_back({"empty route on edge#" + std::to_string(e)});
      continue;
    }
    if (route.front().s0 != span.lo || route.back().s1 != span.hi) {
      out.push_back({"route does not cover edge#" + std::to_string(e)});
      continue;
    }
    for (int i = 0; i < int(route.size()); ++i) {
      const auto& st = route[i];
      if (!(st.s0 < st.s1)) {
        out.push_back({"degenerate step on edge#" + std::to_string(e)});
        continue;
      }
      if (!st.stay) {
        if (st.tedge < 0 || st.tedge >= int(dst.edges.size())) {
          out.push_back({"route step targets missing edge"});
          continue;
        }
        Interval ts = dst.edge_span(st.tedge);
        if (st.t0 == st.t1 || !ts.contains(st.t0) || !ts.contains(st.t1))
          out.push_back({"route step heights outside target edge span"});
      }
      if (i + 1 < int(route.size())) {
        if (route[i].s1 != route[i + 1].s0)
          out.push_back({"route gap on edge#" + std::to_string(e)});
        if (!(route[i].end(dst) == route[i + 1].start(dst)))
          out.push_back({"route discontinuity on edge#" + std::to_string(e)});
      }
    }
    if (!(route.front().start(dst) == m.vertex_image[src.edges[e].lower]))
      out.push_back({"route start differs from lower vertex image on edge#" +
                     std::to_string(e)});
    if (!(route.back().end(dst) == m.vertex_image[src.edges[e].upper]))
      out.push_back({"route end differs from upper vertex image on edge#" +
                     std::to_string(e)});
  }
  return out;
}

Point plmap_eval(const ReebGraph& src, const ReebGraph& dst, const PLMap& m,
                 const Point& p) {
  if (p.is_node()) return m.vertex_image[p.node];
  const auto& route = m.routes[p.edge];
  for (const auto& st : route)
    if (st.s0 <= p.h && p.h <= st.s1) return st.eval(dst, p.h);
  throw std::logic_error("plmap_eval: height not covered");
}

Preimage plmap_preimage(const ReebGraph& src, const ReebGraph& dst,
                        const PLMap& m, const Point& y) {
  Preimage out;
  for (int v = 0; v < int(src.nodes.size()); ++v)
    if (m.vertex_image[v] == y) out.points.push_back(make_node_point(src, v));
  for (int e = 0; e < int(src.edges.size()); ++e) {
    for (const auto& st : m.routes[e]) {
      if (st.stay) {
        if (st.at == y) out.fragments.push_back({e, st.s0, st.s1});
        continue;
      }
      // traversal: invert the affine correspondence
      const Rat& hy = point_height(dst, y);
      Rat tlo = min(st.t0, st.t1), thi = max(st.t0, st.t1);
      if (hy < tlo || hy > thi) continue;
      Point hit;
      bool on_step = false;
      if (!y.is_node()) {
        if (y.edge == st.tedge) on_step = true;
      } else {
        // node endpoints are met when the traversal reaches them
        if (st.start(dst) == y || st.end(dst) == y) on_step = true;
        // or passes through strictly (node interior to the traversed range
        // cannot happen: traversals stay within one edge)
      }
      if (!on_step) continue;
      Rat s = st.s0 + (hy - st.t0) * (st.s1 - st.s0) / (st.t1 - st.t0);
      hit = make_edge_point(src, e, s);
      bool dup = false;
      for (const auto& p : out.points)
        if (p == hit) dup = true;
      if (!dup) out.points.push_back(hit);
    }
  }
  return out;
}

PLMap identity_plmap(const ReebGraph& g) {
  PLMap m;
  m.vertex_image.resize(g.nodes.size());
  for (int v = 0; v < int(g.nodes.size()); ++v)
    m.vertex_image[v] = make_node_point(g, v);
  m.routes.resize(g.edges.size());
  for (int e = 0; e < int(g.edges.size()); ++e) {
    Interval s = g.edge_span(e);
    RouteStep st;
    st.s0 = s.lo;
    st.s1 = s.hi;
    st.tedge = e;
    st.t0 = s.lo;
    st.t1 = s.hi;
    m.routes[e].push_back(st);
  }
  return m;
}

std::vector<Rat> route_breakpoints(const PLMap& m, int src_edge) {
  std::vector<Rat> out;
  for (const auto& st : m.routes[src_edge]) {
    out.push_back(st.s0);
    out.push_back(st.s1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Rat> image_breakpoint_heights(const ReebGraph& dst, const PLMap& m) {
  std::vector<Rat> out;
  for (const auto& p : m.vertex_image) out.push_back(point_height(dst, p));
  for (const auto& route : m.routes)
    for (const auto& st : route) {
      if (st.stay)
        out.push_back(point_height(dst, st.at));
      else {
        out.push_back(st.t0);
        out.push_back(st.t1);
      }
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PLMap retarget_to_subdivision(const ReebGraph& src, const ReebGraph& dst,
                              const PLMap& m, const Subdivision& dst_sub) {
  PLMap out;
  out.vertex_image.resize(m.vertex_image.size());
  for (std::size_t v = 0; v < m.vertex_image.size(); ++v)
    out.vertex_image[v] = dst_sub.to_new(dst, m.vertex_image[v]);
  out.routes.resize(m.routes.size());
  for (std::size_t e = 0; e < m.routes.size(); ++e) {
    for (const auto& st : m.routes[e]) {
      if (st.stay) {
        RouteStep ns = st;
        ns.at = dst_sub.to_new(dst, st.at);
        out.routes[e].push_back(ns);
        continue;
      }
      // split the traversal at the heights of the new target vertices
      Rat tlo = min(st.t0, st.t1), thi = max(st.t0, st.t1);
      std::vector<Rat> cuts{st.t0, st.t1};
      for (int n = 0; n < int(dst_sub.graph.nodes.size()); ++n) {
        if (dst_sub.node_origin_edge[n] != st.tedge) continue;
        const Rat& h = dst_sub.graph.nodes[n].h;
        if (tlo < h && h < thi) cuts.push_back(h);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      if (st.t0 > st.t1) std::reverse(cuts.begin(), cuts.end());
      Rat span_s = st.s1 - st.s0;
      Rat span_t = st.t1 - st.t0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        RouteStep ns;
        ns.s0 = st.s0 + (cuts[i] - st.t0) * span_s / span_t;
        ns.s1 = st.s0 + (cuts[i + 1] - st.t0) * span_s / span_t;
        ns.t0 = cuts[i];
        ns.t1 = cuts[i + 1];
        // locate the subdivided edge carrying this piece
        Rat piece_mid = mid(cuts[i], cuts[i + 1]);
        ns.tedge = -1;
        for (int se = 0; se < int(dst_sub.graph.edges.size()); ++se) {
          if (dst_sub.edge_origin[se] != st.tedge) continue;
          Interval s = dst_sub.graph.edge_span(se);
          if (s.lo < piece_mid && piece_mid < s.hi) {
            ns.tedge = se;
            break;
          }
        }
        if (ns.tedge < 0)
          throw std::logic_error("retarget: piece not covered by subdivision");
        out.routes[e].push_back(ns);
      }
    }
  }
  return out;
}

PLMap restrict_to_subdivision(const ReebGraph& src, const ReebGraph& dst,
                              const PLMap& m, const Subdivision& sub) {
  PLMap out;
  out.vertex_image.resize(sub.graph.nodes.size());
  for (int v = 0; v < int(sub.graph.nodes.size()); ++v) {
    Point orig = sub.to_old(src, make_node_point(sub.graph, v));
    out.vertex_image[v] = plmap_eval(src, dst, m, orig);
  }
  out.routes.resize(sub.graph.edges.size());
  for (int e = 0; e < int(sub.graph.edges.size()); ++e) {
    Interval span = sub.graph.edge_span(e);
    const auto& route = m.routes[sub.edge_origin[e]];
    for (const auto& st : route) {
      Rat lo = max(st.s0, span.lo), hi = min(st.s1, span.hi);
      if (!(lo < hi)) continue;
      RouteStep ns = st;
      ns.s0 = lo;
      ns.s1 = hi;
      if (!st.stay) {
        Rat slope_num = st.t1 - st.t0;
        Rat width = st.s1 - st.s0;
        ns.t0 = st.t0 + (lo - st.s0) * slope_num / width;
        ns.t1 = st.t0 + (hi - st.s0) * slope_num / width;
      }
      out.routes[e].push_back(ns);
    }
  }
  return out;
}

}  // namespace reeb
