#pragma once

#include <vector>

#include "reeb/reeb_graph.hpp"

namespace reeb {

/// One piece of an edge route: over the source height interval [s0, s1] the
/// map either stays at a fixed target point or traverses a target edge
/// affinely from height t0 to t1 (t0 != t1, either direction).
struct RouteStep {
  Rat s0, s1;
  bool stay = false;
  Point at;        // stay target
  int tedge = -1;  // traversal target edge
  Rat t0, t1;

  Point start(const ReebGraph& target) const;
  Point end(const ReebGraph& target) const;
  Point eval(const ReebGraph& target, const Rat& s) const;
};

/// Piecewise-affine value-controlled map between Reeb graphs: one image per
/// source node, one route per source edge. Routes are contiguous walks whose
/// ends match the vertex images.
struct PLMap {
  std::vector<Point> vertex_image;
  std::vector<std::vector<RouteStep>> routes;
};

std::vector<Violation> validate_plmap(const ReebGraph& src, const ReebGraph& dst,
                                      const PLMap& m);

Point plmap_eval(const ReebGraph& src, const ReebGraph& dst, const PLMap& m,
                 const Point& p);

/// Preimage of a target point: isolated source points plus whole source
/// fragments (contributed by stay steps).
struct SourceFragment {
  int edge;
  Rat lo, hi;
};
struct Preimage {
  std::vector<Point> points;
  std::vector<SourceFragment> fragments;
};
Preimage plmap_preimage(const ReebGraph& src, const ReebGraph& dst,
                        const PLMap& m, const Point& y);

PLMap identity_plmap(const ReebGraph& g);

/// Breakpoint heights of the route on a source edge (s-values of step ends).
std::vector<Rat> route_breakpoints(const PLMap& m, int src_edge);

/// Heights on the target reached by vertex images and step endpoints; used
/// when assembling event grids.
std::vector<Rat> image_breakpoint_heights(const ReebGraph& dst, const PLMap& m);

/// A map on a subdivided source induced by a map on the original source
/// (routes are split at the new vertices).
PLMap restrict_to_subdivision(const ReebGraph& src, const ReebGraph& dst,
                              const PLMap& m, const Subdivision& sub);

/// Re-expresses target references through a subdivision of the target:
/// traversal steps are split at the new target vertices, so each step covers
/// a fragment of a single subdivided edge.
PLMap retarget_to_subdivision(const ReebGraph& src, const ReebGraph& dst,
                              const PLMap& m, const Subdivision& dst_sub);

}  // namespace reeb
