#pragma once

// Test-only oracles, independent of the library's implementation paths.

#include <map>
#include <vector>

#include "reeb/complex.hpp"
#include "reeb/interlevel.hpp"
#include "reeb/reeb_graph.hpp"
#include "reeb/union_find.hpp"

namespace oracles {

using namespace reeb;

// components of the exact level set of a complex at height t, as a partition
// of the touched elements (vertices, edges, triangles); returns component
// count. Brute-force union rules, no sweep shared with the library.
inline int level_set_component_count(const Complex2& x,
                                     const std::vector<Rat>& val, const Rat& t) {
  int V = int(x.vertices.size()), E = int(x.edges.size()),
      T = int(x.triangles.size());
  UnionFind uf(V + E + T);
  std::vector<bool> active(V + E + T, false);
  for (int v = 0; v < V; ++v) active[v] = (val[v] == t);
  for (int e = 0; e < E; ++e) {
    int a = x.edges[e][0], b = x.edges[e][1];
    if (val[a] == t && val[b] == t) {
      active[V + e] = true;
      uf.unite(V + e, a);
      uf.unite(V + e, b);
    } else if (min(val[a], val[b]) < t && t < max(val[a], val[b])) {
      active[V + e] = true;
    }
  }
  for (int ti = 0; ti < T; ++ti) {
    const auto& tr = x.triangles[ti];
    Rat lo = min(min(val[tr[0]], val[tr[1]]), val[tr[2]]);
    Rat hi = max(max(val[tr[0]], val[tr[1]]), val[tr[2]]);
    if (t < lo || t > hi) continue;
    active[V + E + ti] = true;
    for (int c = 0; c < 3; ++c)
      if (val[tr[c]] == t) uf.unite(V + E + ti, tr[c]);
    for (auto [a, b] :
         {std::pair{tr[0], tr[1]}, {tr[0], tr[2]}, {tr[1], tr[2]}}) {
      int e = x.edge_index(a, b);
      if (active[V + e]) uf.unite(V + E + ti, V + e);
    }
  }
  std::map<int, int> roots;
  int count = 0;
  for (int i = 0; i < V + E + T; ++i)
    if (active[i] && roots.emplace(uf.find(i), count).second) ++count;
  return count;
}

// sublevel-set component count of a graph at height t (independent sweep)
inline int sublevel_component_count(const ReebGraph& g, const Rat& t) {
  int N = int(g.nodes.size());
  UnionFind uf(N);
  std::vector<bool> in(N);
  for (int v = 0; v < N; ++v) in[v] = (g.nodes[v].h <= t);
  for (const auto& e : g.edges)
    if (in[e.lower] && in[e.upper]) uf.unite(e.lower, e.upper);
  std::map<int, int> roots;
  int count = 0;
  for (int v = 0; v < N; ++v)
    if (in[v] && roots.emplace(uf.find(v), count).second) ++count;
  return count;
}

// graph fiber cardinality at height t (nodes at t plus crossing edges)
inline int fiber_point_count(const ReebGraph& g, const Rat& t) {
  int c = 0;
  for (const auto& n : g.nodes)
    if (n.h == t) ++c;
  for (const auto& e : g.edges)
    if (g.nodes[e.lower].h < t && t < g.nodes[e.upper].h) ++c;
  return c;
}

}  // namespace oracles
