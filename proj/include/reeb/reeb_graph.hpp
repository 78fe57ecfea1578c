#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "reeb/rational.hpp"

namespace reeb {

/// Finite combinatorial PL Reeb graph: nodes carry exact rational heights,
/// every edge ascends strictly from its lower to its upper node. Parallel
/// edges are allowed, self-loops are not. The underlying multigraph must be
/// connected and non-empty (a single node with no edges is valid).
struct ReebGraph {
  struct Node {
    std::string id;
    Rat h;
  };
  struct Edge {
    int lower = -1;
    int upper = -1;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::string name;

  int node_index(const std::string& id) const;
  const Rat& height(int node) const { return nodes[node].h; }
  Interval edge_span(int e) const {
    return Interval(nodes[edges[e].lower].h, nodes[edges[e].upper].h);
  }

  /// Rebuilds the id and incidence caches. Call after direct mutation.
  void reindex();
  const std::vector<int>& up_edges(int node) const { return up_edges_[node]; }
  const std::vector<int>& down_edges(int node) const { return down_edges_[node]; }
  int degree(int node) const {
    return int(up_edges_[node].size() + down_edges_[node].size());
  }

  Rat min_height() const;
  Rat max_height() const;

 private:
  std::unordered_map<std::string, int> id_index_;
  std::vector<std::vector<int>> up_edges_, down_edges_;
};

/// A location on a Reeb graph: a node, or an interior point of an edge.
/// Construction through make_* canonicalizes edge points at endpoint heights
/// to node form.
struct Point {
  int node = -1;
  int edge = -1;
  Rat h;

  bool is_node() const { return node >= 0; }
  bool operator==(const Point& o) const {
    return node == o.node && edge == o.edge && (is_node() || h == o.h);
  }
  bool operator!=(const Point& o) const { return !(*this == o); }
};

Point make_node_point(const ReebGraph& g, int node);
Point make_edge_point(const ReebGraph& g, int edge, const Rat& h);
Point make_point_by_id(const ReebGraph& g, const std::string& node_id);
const Rat& point_height(const ReebGraph& g, const Point& p);
std::string point_str(const ReebGraph& g, const Point& p);

/// Canonical order used for deterministic choices: node points first
/// (node-id string order), then edge points by (edge index, height).
bool point_less(const ReebGraph& g, const Point& a, const Point& b);

struct Violation {
  std::string message;
};

/// Empty result iff all ReebGraph invariants hold. Violations are data,
/// not failures; each names the offending node or edge.
std::vector<Violation> validate(const ReebGraph& g);
bool is_valid(const ReebGraph& g);

/// Sorted, deduplicated node heights (the PL breakpoints).
std::vector<Rat> critical_heights(const ReebGraph& g);

/// Value-preserving subdivision: every cut height interior to an edge span
/// becomes a degree-2 node. Original nodes keep their indices; new nodes and
/// the rebuilt edge list are appended deterministically.
struct Subdivision {
  ReebGraph graph;
  std::vector<int> node_origin_node;  // per new node: original node, or -1
  std::vector<int> node_origin_edge;  // per cut node: original edge, else -1
  std::vector<int> edge_origin;       // per new edge: original edge

  Point to_new(const ReebGraph& original, const Point& p) const;
  Point to_old(const ReebGraph& original, const Point& p) const;
};
Subdivision subdivide(const ReebGraph& g, const std::vector<Rat>& cuts);

/// Removes every degree-2 node with exactly one incoming and one outgoing
/// edge, merging its two edges; idempotent; output canonically ordered.
struct Canonicalization {
  ReebGraph graph;
  std::vector<int> node_origin;            // per new node: original node
  std::vector<std::vector<int>> edge_chain;  // per new edge: original edges, ascending

  Point to_new(const ReebGraph& original, const Point& p) const;
  Point to_old(const ReebGraph& original, const Point& p) const;
};
Canonicalization canonicalize(const ReebGraph& g);

/// Canonical node order: sort by (height, degree signature, refined
/// neighborhood color), ties completed by backtracking over
/// individualizations; the certificate string is minimal over choices.
/// Two graphs are value-preserving isomorphic iff the certificates of their
/// canonical forms are equal.
struct CanonicalLabeling {
  std::vector<int> order;   // order[i] = node index at canonical position i
  std::string certificate;
};
CanonicalLabeling canonical_labeling(const ReebGraph& g);

/// Reorders nodes/edges of g in place into canonical order.
void canonical_sort(ReebGraph& g, std::vector<int>* old_to_new_node = nullptr,
                    std::vector<int>* old_to_new_edge = nullptr);

/// Height-preserving multigraph isomorphism between the canonical forms of
/// f and g, as a node-id bijection; absent if none exists.
std::optional<std::vector<std::pair<std::string, std::string>>> is_isomorphic(
    const ReebGraph& f, const ReebGraph& g);

bool is_contour_tree(const ReebGraph& g);
bool is_merge_tree(const ReebGraph& g);

/// A walk: a start point, traversal steps along edges (strictly monotone in
/// height within each step), and an end point. Steps are contiguous.
struct WalkStep {
  int edge = -1;
  Rat from_h, to_h;
};
struct Walk {
  Point start, end;
  std::vector<WalkStep> steps;
};

/// The unique injective path between two points of a contour tree (B(p,q)).
/// Throws std::invalid_argument("geodesic requires contour tree") otherwise.
Walk tree_geodesic(const ReebGraph& t, const Point& p, const Point& q);

}  // namespace reeb
