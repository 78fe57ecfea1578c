#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Member set of one connected component of an interlevel preimage,
/// as sorted node and edge indices of the underlying graph. Keys are
/// order-independent, so equal member sets compare equal across queries
/// with different intervals (cross-operation component identity).
struct ComponentKey {
  std::vector<int> nodes, edges;

  bool operator==(const ComponentKey& o) const {
    return nodes == o.nodes && edges == o.edges;
  }
  bool operator<(const ComponentKey& o) const {
    if (nodes != o.nodes) return nodes < o.nodes;
    return edges < o.edges;
  }
  std::uint64_t stable_id() const;
  std::string str(const ReebGraph& g) const;
  bool contains_node(int n) const;
  bool contains_edge(int e) const;
};

/// Partition of f^-1(iv) into connected components, computed by union-find
/// over the subgraph clipped to the closed interval iv. Boundary points at
/// exactly lo or hi are included.
struct InterlevelPartition {
  Interval iv;
  std::vector<int> node_comp;  // -1 when the node is outside iv
  std::vector<int> edge_comp;  // -1 when the edge has no interior fragment in iv
  std::vector<ComponentKey> components;

  int count() const { return int(components.size()); }
  /// Component index of a point, or -1 if the point lies outside f^-1(iv).
  int component_of(const ReebGraph& g, const Point& p) const;
  const ComponentKey& key_of(const ReebGraph& g, const Point& p) const;
};

InterlevelPartition interlevel_components(const ReebGraph& g, const Interval& iv);

/// True iff p and q lie in one connected component of f^-1(iv).
/// Throws std::invalid_argument("point outside interlevel") when a point is
/// not in the preimage.
bool connected_in_interlevel(const ReebGraph& g, const Point& p, const Point& q,
                             const Interval& iv);

/// The path-height pseudometric d_f: the least width of a closed interval in
/// whose preimage p and q are connected. Candidate interval endpoints are the
/// critical heights together with the two point heights.
Rat path_height_distance(const ReebGraph& g, const Point& p, const Point& q);

/// Same, but also reports the minimizing interval.
std::pair<Rat, Interval> path_height_distance_interval(const ReebGraph& g,
                                                       const Point& p,
                                                       const Point& q);

/// Pairwise d_f over a site list (one sweep per candidate lower endpoint,
/// union-find per sweep). This is the data-parallel kernel behind the
/// distortion verifier; the _serial variant is the reference implementation.
std::vector<std::vector<Rat>> site_distance_matrix(const ReebGraph& g,
                                                   const std::vector<Point>& sites);
std::vector<std::vector<Rat>> site_distance_matrix_serial(
    const ReebGraph& g, const std::vector<Point>& sites);

}  // namespace reeb
