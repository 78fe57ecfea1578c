#pragma once

#include <map>
#include <memory>

#include "reeb/complex.hpp"
#include "reeb/interlevel.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// The delta-smoothing of a graph: the Reeb quotient of its delta-thickening,
/// together with the natural map zeta of G into it and the dictionary
/// identifying points of the smoothing at height t with connected components
/// of g^-1[t-delta, t+delta].
class SmoothedGraph {
 public:
  ReebGraph graph;
  Rat delta;

  /// Natural map of G into the smoothing (value-preserving).
  Point zeta(const Point& p_of_source) const;

  /// Dictionary: the smoothing point at height t representing the window
  /// component with the given member set.
  Point point_for(const Rat& t, const ComponentKey& window_component) const;

  /// Inverse dictionary: member set of the window component a smoothing
  /// point stands for.
  ComponentKey window_key(const Point& p_of_smoothing) const;

  /// Whether a height-monotone path joins the two smoothing points
  /// (from must not lie above to).
  bool monotone_path_exists(const Point& from, const Point& to) const;

  /// Unique monotone ascent to the given height; requires the smoothing to
  /// be a merge tree (each node at most one upward edge).
  Point ascend_unique(const Point& from, const Rat& to_height) const;

  const ReebGraph& source() const { return source_; }

 private:
  friend SmoothedGraph smooth(const ReebGraph&, const Rat&);
  ReebGraph source_;
  Complex2 thick_;
  ReebOfResult quot_;
  mutable std::map<std::pair<Rat, Rat>, InterlevelPartition> window_cache_;
  const InterlevelPartition& window_partition(const Interval& iv) const;
};

SmoothedGraph smooth(const ReebGraph& g, const Rat& delta);

/// The merge tree of sublevel-set components, truncated at m = max g, with
/// the sublevel class map i and (when the source is itself a merge tree) the
/// fiber-inverse rho.
class MergeTreeView {
 public:
  ReebGraph tree;
  Rat m;  // max height of the source
  bool source_is_merge_tree = false;

  /// Sublevel class of a source point, as a point of the tree at the same
  /// height.
  Point i_map(const Point& p_of_source) const;

  /// The unique source point at the tree point's height inside its class.
  /// Defined only when the source is a merge tree.
  Point rho(const Point& p_of_tree) const;

  /// Unique monotone ascent inside the tree.
  Point tree_ascend(const Point& p_of_tree, const Rat& to_height) const;

  const ReebGraph& source() const { return source_; }

 private:
  friend MergeTreeView merge_tree_of(const ReebGraph&);
  ReebGraph source_;
  std::vector<Rat> levels_;
  // per level snapshot: node -> class root (over source nodes)
  std::vector<std::vector<int>> root_at_;
  // per level: class root -> pending tree node (the arc open after the level)
  std::vector<std::map<int, int>> pending_at_;
  // tree node -> (level index, class root) at creation
  std::vector<std::pair<int, int>> tree_node_class_;
  int level_index_at_or_below(const Rat& h) const;
  int class_root_of_point(const Point& p, int level_idx) const;
};

MergeTreeView merge_tree_of(const ReebGraph& g);

/// Whether the sublevel class map i is injective, decided combinatorially:
/// no two points at equal height share a sublevel class.
bool i_injective(const ReebGraph& g);

/// The shift map from smoothing points to merge-tree points: the point for
/// component U of g^-1[t-delta, t+delta] goes to the sublevel class of U at
/// height min(t+delta, m). Requires is_merge_tree(g).
struct KappaDelta {
  SmoothedGraph smoothing;
  MergeTreeView merge_view;
  Rat delta;

  Point apply(const Point& smoothing_point) const;
  /// rho after kappa: the capped shift from smoothing points back into g.
  Point apply_rho(const Point& smoothing_point) const;
};
KappaDelta kappa_delta(const ReebGraph& g, const Rat& delta);

/// Checks that rho . kappa^delta . quotient returns (p, -delta') to p for
/// every sample; a sample is admissible when delta' == delta, or when
/// g(p) == max g and |delta'| <= delta.
struct ShiftSample {
  Point p;
  Rat delta_prime;
};
bool check_thickening_shift(const ReebGraph& g, const Rat& delta,
                            const std::vector<ShiftSample>& samples);

}  // namespace reeb
