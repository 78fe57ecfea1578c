#pragma once

#include <array>
#include <string>
#include <vector>

#include "reeb/interlevel.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Provenance of a cell in a built product complex (thickening, epigraph):
/// which graph element it came from. copy: -1 bottom, 0 center/base, +1 top.
struct CellProv {
  int g_node = -1;
  int g_edge = -1;
  int copy = 0;
};

/// Finite simplicial complex of dimension <= 2 with rational vertex heights.
/// The PL extension of the vertex heights is the implicit function; level
/// sets may contain whole edges and triangles (no flatness constraint).
struct Complex2 {
  struct Vertex {
    std::string id;
    Rat h;
  };
  using Prov = CellProv;

  std::vector<Vertex> vertices;
  std::vector<std::array<int, 2>> edges;      // normalized: smaller index first
  std::vector<std::array<int, 3>> triangles;  // normalized ascending
  std::vector<Prov> vertex_prov, edge_prov, tri_prov;

  int vertex_index(const std::string& id) const;
  int edge_index(int a, int b) const;  // -1 if absent
  void reindex();
  const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }
  const std::vector<int>& edge_triangles(int e) const { return edge_tris_[e]; }

  int add_vertex(const std::string& id, const Rat& h, CellProv prov = CellProv());
  int add_edge(int a, int b, CellProv prov = CellProv());          // idempotent
  int add_triangle(int a, int b, int c, CellProv prov = CellProv());  // adds missing edges

 private:
  std::unordered_map<std::string, int> id_index_;
  std::unordered_map<long long, int> edge_index_;
  std::vector<std::vector<int>> vertex_edges_;
  std::vector<std::vector<int>> edge_tris_;
};

std::vector<Violation> validate_complex(const Complex2& x);

/// Value-preserving quotient data: where every complex vertex lands in the
/// output graph, and per complex edge the height-preserving fragment routing.
struct QuotientMap {
  std::vector<Point> vertex_image;
  struct Frag {
    Rat lo, hi;   // height range on the complex edge (lo < hi)
    int gedge;    // output edge carrying the same heights
  };
  std::vector<std::vector<Frag>> edge_image;  // empty for flat edges
  std::vector<Point> flat_edge_image;         // image point for flat edges

  Point edge_point_image(const ReebGraph& out, int cedge, const Rat& h) const;
};

struct ReebOfResult {
  ReebGraph graph;
  QuotientMap map;
};

/// Reeb quotient of the PL function on a finite 2-complex: one sweep over the
/// vertex levels with union-find per level set and per open slab. The output
/// is canonicalized and canonically ordered; the quotient map is value
/// preserving and surjective.
/// Throws std::invalid_argument("induced Reeb graph requires connected domain")
/// on a disconnected complex.
ReebOfResult reeb_of(const Complex2& x);
ReebOfResult reeb_of(const Complex2& x, const std::vector<Rat>& height_override);

/// G as a 1-dimensional complex (center-copy provenance).
Complex2 graph_as_complex(const ReebGraph& g);

/// Triangulated G x [-delta, delta] with function f(p)+t; the central copy
/// G x {0} is retained as a marked subcomplex (copy == 0 provenance).
Complex2 thickened_complex(const ReebGraph& g, const Rat& delta);

/// Triangulated {(p,t) : t >= 0, f(p)+t <= cap} with function f(p)+t; the
/// base copy G x {0} carries copy == 0 provenance. Requires cap >= max g.
Complex2 epigraph_complex(const ReebGraph& g, const Rat& cap);

/// Whole-cell subgraph: node and edge index sets of a (subdivided) graph.
struct SubgraphCells {
  std::vector<int> nodes, edges;
  bool empty() const { return nodes.empty() && edges.empty(); }
};

/// Triangulated product of two connected whole-cell subgraphs; squares are
/// split by the fixed lexicographic diagonal rule. Vertex heights are the
/// first factor's when height_factor == 0, the second's otherwise.
Complex2 product_region_complex(const ReebGraph& F, const SubgraphCells& fs,
                                const ReebGraph& G, const SubgraphCells& gs,
                                int height_factor);

/// Splits every cell at the given levels of the PL function `values` (one
/// value per vertex); `carry` values are interpolated onto new vertices.
/// Used to make every cell's span fit inside one grid slab.
struct ComplexSubdivision {
  Complex2 complex;
  std::vector<Rat> values;               // function after subdivision
  std::vector<std::vector<Rat>> carries; // carried functions after subdivision
};
ComplexSubdivision subdivide_complex_at_levels(
    const Complex2& x, const std::vector<Rat>& values,
    const std::vector<std::vector<Rat>>& carries, const std::vector<Rat>& levels);

}  // namespace reeb
