#include "reeb/complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

namespace {
long long edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (long long)a * 1000000007LL + b;
}
}  // namespace

int Complex2::vertex_index(const std::string& id) const {
  auto it = id_index_.find(id);
  return it == id_index_.end() ? -1 : it->second;
}

int Complex2::edge_index(int a, int b) const {
  auto it = edge_index_.find(edge_key(a, b));
  return it == edge_index_.end() ? -1 : it->second;
}

void Complex2::reindex() {
  id_index_.clear();
  edge_index_.clear();
  for (int i = 0; i < int(vertices.size()); ++i) id_index_[vertices[i].id] = i;
  for (int e = 0; e < int(edges.size()); ++e)
    edge_index_[edge_key(edges[e][0], edges[e][1])] = e;
  vertex_edges_.assign(vertices.size(), {});
  for (int e = 0; e < int(edges.size()); ++e) {
    vertex_edges_[edges[e][0]].push_back(e);
    vertex_edges_[edges[e][1]].push_back(e);
  }
  edge_tris_.assign(edges.size(), {});
  for (int t = 0; t < int(triangles.size()); ++t) {
    const auto& tr = triangles[t];
    for (auto [a, b] : {std::pair{tr[0], tr[1]}, {tr[0], tr[2]}, {tr[1], tr[2]}}) {
      int e = edge_index(a, b);
      if (e >= 0) edge_tris_[e].push_back(t);
    }
  }
  vertex_prov.resize(vertices.size());
  edge_prov.resize(edges.size());
  tri_prov.resize(triangles.size());
}

int Complex2::add_vertex(const std::string& id, const Rat& h, Prov prov) {
  auto it = id_index_.find(id);
  if (it != id_index_.end()) return it->second;
  int i = int(vertices.size());
  vertices.push_back({id, h});
  vertex_prov.push_back(prov);
  id_index_[id] = i;
  vertex_edges_.push_back({});
  return i;
}

int Complex2::add_edge(int a, int b, Prov prov) {
  if (a == b) throw std::invalid_argument("complex edge endpoints equal");
  if (a > b) std::swap(a, b);
  auto it = edge_index_.find(edge_key(a, b));
  if (it != edge_index_.end()) return it->second;
  int e = int(edges.size());
  edges.push_back({a, b});
  edge_prov.push_back(prov);
  edge_index_[edge_key(a, b)] = e;
  vertex_edges_[a].push_back(e);
  vertex_edges_[b].push_back(e);
  edge_tris_.push_back({});
  return e;
}

int Complex2::add_triangle(int a, int b, int c, Prov prov) {
  std::array<int, 3> t{a, b, c};
  std::sort(t.begin(), t.end());
  if (t[0] == t[1] || t[1] == t[2])
    throw std::invalid_argument("degenerate triangle");
  int e0 = add_edge(t[0], t[1], prov);
  int e1 = add_edge(t[0], t[2], prov);
  int e2 = add_edge(t[1], t[2], prov);
  // linear scan over one edge's triangle list suffices for dedup
  for (int ti : edge_tris_[e0])
    if (triangles[ti] == t) return ti;
  int idx = int(triangles.size());
  triangles.push_back(t);
  tri_prov.push_back(prov);
  edge_tris_[e0].push_back(idx);
  edge_tris_[e1].push_back(idx);
  edge_tris_[e2].push_back(idx);
  return idx;
}

std::vector<Violation> validate_complex(const Complex2& x) {
  std::vector<Violation> out;
  if (x.vertices.empty()) {
    out.push_back({"complex has no vertices"});
    return out;
  }
  std::set<std::string> ids;
  for (const auto& v : x.vertices)
    if (!ids.insert(v.id).second) out.push_back({"duplicate vertex id: " + v.id});
  std::set<long long> eset;
  for (const auto& e : x.edges) {
    if (e[0] == e[1]) out.push_back({"degenerate edge"});
    if (!eset.insert(edge_key(e[0], e[1])).second)
      out.push_back({"duplicate edge"});
  }
  for (const auto& t : x.triangles) {
    for (auto [a, b] : {std::pair{t[0], t[1]}, {t[0], t[2]}, {t[1], t[2]}})
      if (!eset.count(edge_key(a, b)))
        out.push_back({"triangle missing edge"});
  }
  // connectivity over the 1-skeleton
  UnionFind uf(int(x.vertices.size()));
  for (const auto& e : x.edges) uf.unite(e[0], e[1]);
  int root = uf.find(0);
  for (int v = 1; v < int(x.vertices.size()); ++v)
    if (uf.find(v) != root) {
      out.push_back({"complex is disconnected"});
      break;
    }
  return out;
}

Point QuotientMap::edge_point_image(const ReebGraph& out, int cedge,
                                    const Rat& h) const {
  if (!flat_edge_image.empty() && edge_image[cedge].empty())
    return flat_edge_image[cedge];
  for (const auto& f : edge_image[cedge])
    if (f.lo <= h && h <= f.hi) return make_edge_point(out, f.gedge, h);
  throw std::logic_error("quotient map: height not covered on edge");
}

namespace {

struct SweepBuild {
  const Complex2& x;
  const std::vector<Rat>& val;
  std::vector<Rat> levels;
  std::vector<int> vl;  // vertex -> level index

  SweepBuild(const Complex2& cx, const std::vector<Rat>& values)
      : x(cx), val(values) {
    levels = values;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    vl.resize(x.vertices.size());
    for (int v = 0; v < int(x.vertices.size()); ++v)
      vl[v] = int(std::lower_bound(levels.begin(), levels.end(), val[v]) -
                  levels.begin());
  }

  int elo(int e) const { return std::min(vl[x.edges[e][0]], vl[x.edges[e][1]]); }
  int ehi(int e) const { return std::max(vl[x.edges[e][0]], vl[x.edges[e][1]]); }
};

}  // namespace

ReebOfResult reeb_of(const Complex2& x, const std::vector<Rat>& height_override) {
  auto viol = validate_complex(x);
  for (const auto& v : viol)
    if (v.message == "complex is disconnected")
      throw std::invalid_argument("induced Reeb graph requires connected domain");
  if (!viol.empty())
    throw std::invalid_argument("invalid complex: " + viol.front().message);
  if (height_override.size() != x.vertices.size())
    throw std::invalid_argument("height table size mismatch");

  SweepBuild sb(x, height_override);
  int V = int(x.vertices.size()), E = int(x.edges.size());
  int L = int(sb.levels.size());

  // --- components of each level set ---------------------------------------
  // element ids: vertex v -> v, crossing edge e -> V + e
  std::vector<std::vector<int>> level_comp_of_vertex(L),
      level_comp_of_edge(L);  // -1 when absent
  std::vector<int> level_comp_count(L, 0);
  // representatives for building nodes
  std::vector<std::vector<int>> level_roots(L);
  std::vector<std::map<int, int>> root_to_comp(L);

  for (int k = 0; k < L; ++k) {
    UnionFind uf(V + E);
    std::vector<bool> active(V + E, false);
    for (int v = 0; v < V; ++v) active[v] = (sb.vl[v] == k);
    for (int e = 0; e < E; ++e) {
      int a = x.edges[e][0], b = x.edges[e][1];
      if (sb.vl[a] == k && sb.vl[b] == k) {
        // flat edge at this level
        uf.unite(a, b);
      } else if (sb.elo(e) < k && k < sb.ehi(e)) {
        active[V + e] = true;
      }
    }
    for (int t = 0; t < int(x.triangles.size()); ++t) {
      const auto& tr = x.triangles[t];
      int lo = std::min({sb.vl[tr[0]], sb.vl[tr[1]], sb.vl[tr[2]]});
      int hi = std::max({sb.vl[tr[0]], sb.vl[tr[1]], sb.vl[tr[2]]});
      if (!(lo < k && k < hi)) continue;
      // items crossed by the level segment inside this triangle
      std::vector<int> items;
      for (int c = 0; c < 3; ++c)
        if (sb.vl[tr[c]] == k) items.push_back(tr[c]);
      for (auto [a, b] : {std::pair{tr[0], tr[1]}, {tr[0], tr[2]}, {tr[1], tr[2]}}) {
        int e = x.edge_index(a, b);
        if (sb.elo(e) < k && k < sb.ehi(e)) items.push_back(V + e);
      }
      for (int i = 1; i < int(items.size()); ++i) uf.unite(items[0], items[i]);
    }
    level_comp_of_vertex[k].assign(V, -1);
    level_comp_of_edge[k].assign(E, -1);
    std::map<int, std::vector<int>> groups;
    for (int v = 0; v < V; ++v)
      if (active[v]) groups[uf.find(v)].push_back(v);
    for (int e = 0; e < E; ++e)
      if (active[V + e]) groups[uf.find(V + e)].push_back(V + e);
    // order components by smallest member for determinism
    std::vector<std::pair<int, int>> ordered;  // (min member, root)
    for (auto& [root, mem] : groups)
      ordered.push_back({*std::min_element(mem.begin(), mem.end()), root});
    std::sort(ordered.begin(), ordered.end());
    for (int c = 0; c < int(ordered.size()); ++c) {
      root_to_comp[k][ordered[c].second] = c;
      level_roots[k].push_back(ordered[c].second);
    }
    level_comp_count[k] = int(ordered.size());
    for (int v = 0; v < V; ++v)
      if (active[v]) level_comp_of_vertex[k][v] = root_to_comp[k][uf.find(v)];
    for (int e = 0; e < E; ++e)
      if (active[V + e])
        level_comp_of_edge[k][e] = root_to_comp[k][uf.find(V + e)];
  }

  // --- components of each open slab ----------------------------------------
  std::vector<std::vector<int>> slab_comp_of_edge(std::max(0, L - 1));
  std::vector<int> slab_comp_count(std::max(0, L - 1), 0);
  for (int k = 0; k + 1 < L; ++k) {
    UnionFind uf(E);
    std::vector<bool> span(E, false);
    for (int e = 0; e < E; ++e)
      span[e] = (sb.elo(e) <= k && sb.ehi(e) >= k + 1);
    for (const auto& tr : x.triangles) {
      int tlo = std::min({sb.vl[tr[0]], sb.vl[tr[1]], sb.vl[tr[2]]});
      int thi = std::max({sb.vl[tr[0]], sb.vl[tr[1]], sb.vl[tr[2]]});
      if (!(tlo <= k && thi >= k + 1)) continue;
      std::vector<int> spanning;
      for (auto [a, b] : {std::pair{tr[0], tr[1]}, {tr[0], tr[2]}, {tr[1], tr[2]}}) {
        int e = x.edge_index(a, b);
        if (span[e]) spanning.push_back(e);
      }
      for (int i = 1; i < int(spanning.size()); ++i)
        uf.unite(spanning[0], spanning[i]);
    }
    slab_comp_of_edge[k].assign(E, -1);
    std::map<int, int> comp_of_root;
    std::vector<std::pair<int, int>> ordered;
    std::map<int, int> min_member;
    for (int e = 0; e < E; ++e)
      if (span[e]) {
        int r = uf.find(e);
        if (!min_member.count(r)) min_member[r] = e;
      }
    for (auto& [r, m] : min_member) ordered.push_back({m, r});
    std::sort(ordered.begin(), ordered.end());
    for (int c = 0; c < int(ordered.size()); ++c)
      comp_of_root[ordered[c].second] = c;
    slab_comp_count[k] = int(ordered.size());
    for (int e = 0; e < E; ++e)
      if (span[e]) slab_comp_of_edge[k][e] = comp_of_root[uf.find(e)];
  }

  // --- assemble the raw graph ----------------------------------------------
  ReebGraph raw;
  std::vector<std::vector<int>> node_of(L);  // level comp -> raw node
  for (int k = 0; k < L; ++k) {
    node_of[k].resize(level_comp_count[k]);
    for (int c = 0; c < level_comp_count[k]; ++c) {
      node_of[k][c] = int(raw.nodes.size());
      raw.nodes.push_back(
          {"q" + std::to_string(k) + "_" + std::to_string(c), sb.levels[k]});
    }
  }
  // slab component -> raw edge, with attachments
  std::vector<std::vector<int>> slab_edge(std::max(0, L - 1));
  for (int k = 0; k + 1 < L; ++k) {
    slab_edge[k].assign(slab_comp_count[k], -1);
    std::vector<int> rep(slab_comp_count[k], -1);
    for (int e = 0; e < E; ++e) {
      int c = slab_comp_of_edge[k][e];
      if (c >= 0 && rep[c] < 0) rep[c] = e;
    }
    for (int c = 0; c < slab_comp_count[k]; ++c) {
      int e = rep[c];
      int a = x.edges[e][0], b = x.edges[e][1];
      if (sb.vl[a] > sb.vl[b]) std::swap(a, b);
      int low_comp = (sb.vl[a] == k) ? level_comp_of_vertex[k][a]
                                     : level_comp_of_edge[k][e];
      int high_comp = (sb.vl[b] == k + 1) ? level_comp_of_vertex[k + 1][b]
                                          : level_comp_of_edge[k + 1][e];
      int re = int(raw.edges.size());
      raw.edges.push_back({node_of[k][low_comp], node_of[k + 1][high_comp]});
      slab_edge[k][c] = re;
    }
  }
  raw.reindex();

  // --- raw quotient map ----------------------------------------------------
  QuotientMap rawmap;
  rawmap.vertex_image.resize(V);
  for (int v = 0; v < V; ++v)
    rawmap.vertex_image[v] =
        make_node_point(raw, node_of[sb.vl[v]][level_comp_of_vertex[sb.vl[v]][v]]);
  rawmap.edge_image.resize(E);
  rawmap.flat_edge_image.resize(E);
  for (int e = 0; e < E; ++e) {
    int a = x.edges[e][0], b = x.edges[e][1];
    if (sb.vl[a] == sb.vl[b]) {
      rawmap.flat_edge_image[e] = rawmap.vertex_image[a];
      continue;
    }
    int klo = sb.elo(e), khi = sb.ehi(e);
    for (int k = klo; k < khi; ++k) {
      int c = slab_comp_of_edge[k][e];
      rawmap.edge_image[e].push_back(
          {sb.levels[k], sb.levels[k + 1], slab_edge[k][c]});
    }
  }

  // --- canonicalize and rename ---------------------------------------------
  Canonicalization canon = canonicalize(raw);
  ReebOfResult out;
  out.graph = canon.graph;
  for (int i = 0; i < int(out.graph.nodes.size()); ++i)
    out.graph.nodes[i].id = "n" + std::to_string(i);
  out.graph.reindex();
  // raw edge -> canonical edge
  std::vector<int> raw_edge_to_new(raw.edges.size(), -1);
  for (int e = 0; e < int(canon.edge_chain.size()); ++e)
    for (int re : canon.edge_chain[e]) raw_edge_to_new[re] = e;

  out.map.vertex_image.resize(V);
  for (int v = 0; v < V; ++v) {
    Point p = canon.to_new(raw, rawmap.vertex_image[v]);
    out.map.vertex_image[v] = p;
  }
  out.map.edge_image.resize(E);
  out.map.flat_edge_image.resize(E);
  for (int e = 0; e < E; ++e) {
    if (rawmap.edge_image[e].empty()) {
      if (rawmap.flat_edge_image[e].is_node() || rawmap.flat_edge_image[e].edge >= 0)
        out.map.flat_edge_image[e] = canon.to_new(raw, rawmap.flat_edge_image[e]);
      continue;
    }
    for (const auto& f : rawmap.edge_image[e])
      out.map.edge_image[e].push_back({f.lo, f.hi, raw_edge_to_new[f.gedge]});
  }
  return out;
}

ReebOfResult reeb_of(const Complex2& x) {
  std::vector<Rat> values;
  values.reserve(x.vertices.size());
  for (const auto& v : x.vertices) values.push_back(v.h);
  return reeb_of(x, values);
}

namespace {

// midpoint-split copy of a graph: no two edges share both endpoints, every
// half remembers its original edge
struct SimpleSplit {
  ReebGraph graph;
  std::vector<int> orig_node;  // per node: original node or -1 (midpoint)
  std::vector<int> orig_edge;  // per edge: original edge
};

SimpleSplit split_parallel(const ReebGraph& g) {
  SimpleSplit out;
  out.graph.name = g.name;
  out.graph.nodes = g.nodes;
  out.orig_node.resize(g.nodes.size());
  std::iota(out.orig_node.begin(), out.orig_node.end(), 0);
  std::map<std::pair<int, int>, int> pair_count;
  for (const auto& e : g.edges) pair_count[{e.lower, e.upper}]++;
  for (int e = 0; e < int(g.edges.size()); ++e) {
    if (pair_count[{g.edges[e].lower, g.edges[e].upper}] == 1) {
      out.graph.edges.push_back(g.edges[e]);
      out.orig_edge.push_back(e);
      continue;
    }
    Interval s = g.edge_span(e);
    int m = int(out.graph.nodes.size());
    out.graph.nodes.push_back({"mid." + std::to_string(e), mid(s.lo, s.hi)});
    out.orig_node.push_back(-1);
    out.graph.edges.push_back({g.edges[e].lower, m});
    out.orig_edge.push_back(e);
    out.graph.edges.push_back({m, g.edges[e].upper});
    out.orig_edge.push_back(e);
  }
  out.graph.reindex();
  return out;
}

}  // namespace

Complex2 graph_as_complex(const ReebGraph& g) {
  Complex2 x;
  x.reindex();
  SimpleSplit s = split_parallel(g);
  for (int v = 0; v < int(s.graph.nodes.size()); ++v) {
    int ov = s.orig_node[v];
    // midpoint vertices carry their edge's provenance
    int oe = ov >= 0 ? -1 : s.orig_edge[0];
    if (ov < 0) {
      for (int e = 0; e < int(s.graph.edges.size()); ++e)
        if (s.graph.edges[e].upper == v || s.graph.edges[e].lower == v) {
          oe = s.orig_edge[e];
          break;
        }
    }
    x.add_vertex(s.graph.nodes[v].id, s.graph.nodes[v].h, {ov, ov >= 0 ? -1 : oe, 0});
  }
  for (int e = 0; e < int(s.graph.edges.size()); ++e)
    x.add_edge(s.graph.edges[e].lower, s.graph.edges[e].upper,
               {-1, s.orig_edge[e], 0});
  return x;
}

namespace {

// split the square (a_bottom, b_bottom, a_top, b_top) by the lexicographic
// diagonal rule: connect the smallest vertex-id pair among the two diagonals
void split_square(Complex2& x, int a0, int b0, int a1, int b1,
                  Complex2::Prov prov) {
  auto idp = [&](int u, int v) {
    std::string iu = x.vertices[u].id, iv = x.vertices[v].id;
    if (iv < iu) std::swap(iu, iv);
    return iu + "\x01" + iv;
  };
  // diagonals: (a0, b1) and (b0, a1)
  if (idp(a0, b1) <= idp(b0, a1)) {
    x.add_triangle(a0, b0, b1, prov);
    x.add_triangle(a0, a1, b1, prov);
  } else {
    x.add_triangle(a0, b0, a1, prov);
    x.add_triangle(b0, a1, b1, prov);
  }
}

}  // namespace

Complex2 thickened_complex(const ReebGraph& g, const Rat& delta) {
  if (delta < Rat(0)) throw std::invalid_argument("thickening needs delta >= 0");
  if (delta == Rat(0)) return graph_as_complex(g);
  Complex2 x;
  x.reindex();
  SimpleSplit s = split_parallel(g);
  int N = int(s.graph.nodes.size());
  auto vert_prov = [&](int v, int copy) -> CellProv {
    int ov = s.orig_node[v];
    if (ov >= 0) return {ov, -1, copy};
    // midpoint vertex: tag with its edge
    for (int e = 0; e < int(s.graph.edges.size()); ++e)
      if (s.graph.edges[e].lower == v || s.graph.edges[e].upper == v)
        return {-1, s.orig_edge[e], copy};
    return {};
  };
  std::vector<int> bot(N), ctr(N), top(N);
  for (int v = 0; v < N; ++v) {
    const auto& n = s.graph.nodes[v];
    bot[v] = x.add_vertex(n.id + "@-", n.h - delta, vert_prov(v, -1));
    ctr[v] = x.add_vertex(n.id + "@0", n.h, vert_prov(v, 0));
    top[v] = x.add_vertex(n.id + "@+", n.h + delta, vert_prov(v, +1));
    x.add_edge(bot[v], ctr[v], vert_prov(v, -1));
    x.add_edge(ctr[v], top[v], vert_prov(v, +1));
  }
  for (int e = 0; e < int(s.graph.edges.size()); ++e) {
    int u = s.graph.edges[e].lower, w = s.graph.edges[e].upper;
    int oe = s.orig_edge[e];
    x.add_edge(bot[u], bot[w], {-1, oe, -1});
    x.add_edge(ctr[u], ctr[w], {-1, oe, 0});
    x.add_edge(top[u], top[w], {-1, oe, +1});
    split_square(x, bot[u], bot[w], ctr[u], ctr[w], {-1, oe, -1});
    split_square(x, ctr[u], ctr[w], top[u], top[w], {-1, oe, +1});
  }
  return x;
}

Complex2 epigraph_complex(const ReebGraph& g, const Rat& cap) {
  if (cap < g.max_height())
    throw std::invalid_argument("epigraph cap below max height");
  Complex2 x;
  x.reindex();
  SimpleSplit s = split_parallel(g);
  int N = int(s.graph.nodes.size());
  std::vector<int> base(N), top(N, -1);
  for (int v = 0; v < N; ++v) {
    const auto& n = s.graph.nodes[v];
    int ov = s.orig_node[v];
    base[v] = x.add_vertex(n.id + "@b", n.h, {ov, -1, 0});
    if (n.h < cap) {
      top[v] = x.add_vertex(n.id + "@t", cap, {ov, -1, +1});
      x.add_edge(base[v], top[v], {ov, -1, +1});
    }
  }
  for (int e = 0; e < int(s.graph.edges.size()); ++e) {
    int u = s.graph.edges[e].lower, w = s.graph.edges[e].upper;
    int oe = s.orig_edge[e];
    x.add_edge(base[u], base[w], {-1, oe, 0});
    if (top[w] >= 0) {
      x.add_edge(top[u], top[w], {-1, oe, +1});
      split_square(x, base[u], base[w], top[u], top[w], {-1, oe, +1});
    } else {
      // the upper node sits at the cap: the region is a triangle
      x.add_triangle(base[u], base[w], top[u], {-1, oe, +1});
    }
  }
  return x;
}

Complex2 product_region_complex(const ReebGraph& F, const SubgraphCells& fs,
                                const ReebGraph& G, const SubgraphCells& gs,
                                int height_factor) {
  if (fs.empty() || gs.empty())
    throw std::invalid_argument("empty fragment set");
  Complex2 x;
  x.reindex();
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
  auto vid = [&](int fn, int gn) {
    return F.nodes[fn].id + "|" + G.nodes[gn].id;
  };
  auto vh = [&](int fn, int gn) {
    return height_factor == 0 ? F.nodes[fn].h : G.nodes[gn].h;
  };
  std::map<std::pair<int, int>, int> vv;
  for (int fn : fnodes)
    for (int gn : gnodes) vv[{fn, gn}] = x.add_vertex(vid(fn, gn), vh(fn, gn));
  for (int fe : fs.edges)
    for (int gn : gnodes)
      x.add_edge(vv[{F.edges[fe].lower, gn}], vv[{F.edges[fe].upper, gn}]);
  for (int ge : gs.edges)
    for (int fn : fnodes)
      x.add_edge(vv[{fn, G.edges[ge].lower}], vv[{fn, G.edges[ge].upper}]);
  for (int fe : fs.edges)
    for (int ge : gs.edges) {
      int a0 = vv[{F.edges[fe].lower, G.edges[ge].lower}];
      int b0 = vv[{F.edges[fe].upper, G.edges[ge].lower}];
      int a1 = vv[{F.edges[fe].lower, G.edges[ge].upper}];
      int b1 = vv[{F.edges[fe].upper, G.edges[ge].upper}];
      split_square(x, a0, b0, a1, b1, CellProv{});
    }
  return x;
}

ComplexSubdivision subdivide_complex_at_levels(
    const Complex2& x, const std::vector<Rat>& values,
    const std::vector<std::vector<Rat>>& carries, const std::vector<Rat>& levels) {
  std::vector<Rat> lv = levels;
  std::sort(lv.begin(), lv.end());
  lv.erase(std::unique(lv.begin(), lv.end()), lv.end());

  ComplexSubdivision out;
  out.complex.reindex();
  out.carries.resize(carries.size());
  for (int v = 0; v < int(x.vertices.size()); ++v) {
    out.complex.add_vertex(x.vertices[v].id, values[v]);
    out.values.push_back(values[v]);
    for (std::size_t c = 0; c < carries.size(); ++c)
      out.carries[c].push_back(carries[c][v]);
  }

  // cut vertices per original edge, ordered from endpoint 0 to endpoint 1
  auto cut_id = [&](int a, int b, const Rat& t) {
    if (x.vertices[b].id < x.vertices[a].id) std::swap(a, b);
    return x.vertices[a].id + "%" + x.vertices[b].id + "%" + t.str();
  };
  std::vector<std::vector<int>> edge_cuts(x.edges.size());
  for (int e = 0; e < int(x.edges.size()); ++e) {
    int a = x.edges[e][0], b = x.edges[e][1];
    const Rat &va = values[a], &vb = values[b];
    if (va == vb) continue;
    const Rat lo = min(va, vb), hi = max(va, vb);
    std::vector<std::pair<Rat, int>> cuts;  // (value, vertex)
    for (const Rat& t : lv) {
      if (!(lo < t && t < hi)) continue;
      Rat tau = (t - va) / (vb - va);
      int vi = out.complex.vertex_index(cut_id(a, b, t));
      if (vi < 0) {
        vi = out.complex.add_vertex(cut_id(a, b, t), t);
        out.values.push_back(t);
        for (std::size_t c = 0; c < carries.size(); ++c)
          out.carries[c].push_back(carries[c][a] +
                                   tau * (carries[c][b] - carries[c][a]));
      }
      cuts.push_back({(t - va).abs(), vi});  // distance from a orders a -> b
    }
    std::sort(cuts.begin(), cuts.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });
    for (auto& [d, vi] : cuts) edge_cuts[e].push_back(vi);
  }

  // sub-edges
  for (int e = 0; e < int(x.edges.size()); ++e) {
    int prev = x.edges[e][0];
    for (int vi : edge_cuts[e]) {
      out.complex.add_edge(prev, vi);
      prev = vi;
    }
    out.complex.add_edge(prev, x.edges[e][1]);
  }

  // triangles: clip to bands between consecutive relevant levels
  for (const auto& tr : x.triangles) {
    Rat tmin = min(min(values[tr[0]], values[tr[1]]), values[tr[2]]);
    Rat tmax = max(max(values[tr[0]], values[tr[1]]), values[tr[2]]);
    if (tmin == tmax) {
      out.complex.add_triangle(tr[0], tr[1], tr[2]);
      continue;
    }
    // boundary cycle: corner, cuts along each directed side
    std::vector<int> cycle;
    auto side = [&](int a, int b) {
      cycle.push_back(a);
      int e = x.edge_index(a, b);
      std::vector<int> cuts = edge_cuts[e];
      if (x.edges[e][0] != a) std::reverse(cuts.begin(), cuts.end());
      for (int vi : cuts) cycle.push_back(vi);
    };
    side(tr[0], tr[1]);
    side(tr[1], tr[2]);
    side(tr[2], tr[0]);

    std::vector<Rat> bands{tmin};
    for (const Rat& t : lv)
      if (tmin < t && t < tmax) bands.push_back(t);
    bands.push_back(tmax);

    int n = int(cycle.size());
    for (int bi = 0; bi + 1 < int(bands.size()); ++bi) {
      const Rat &blo = bands[bi], &bhi = bands[bi + 1];
      std::vector<bool> in(n);
      for (int i = 0; i < n; ++i) {
        const Rat& v = out.values[cycle[i]];
        in[i] = (blo <= v && v <= bhi);
      }
      // collect in-band points in cycle order, starting after an out-point
      int start = 0;
      while (start < n && in[start]) ++start;
      std::vector<int> poly;
      if (start == n) {
        poly = cycle;  // whole triangle inside the band
      } else {
        for (int s = 0; s < n; ++s) {
          int i = (start + 1 + s) % n;
          if (in[i]) poly.push_back(cycle[i]);
        }
      }
      // dedupe consecutive (and wraparound) repeats
      std::vector<int> p2;
      for (int v : poly)
        if (p2.empty() || p2.back() != v) p2.push_back(v);
      while (p2.size() > 1 && p2.front() == p2.back()) p2.pop_back();
      if (int(p2.size()) < 3) continue;
      for (int i = 1; i + 1 < int(p2.size()); ++i) {
        if (p2[0] == p2[i] || p2[0] == p2[i + 1] || p2[i] == p2[i + 1]) continue;
        out.complex.add_triangle(p2[0], p2[i], p2[i + 1]);
      }
    }
  }
  return out;
}

}  // namespace reeb
