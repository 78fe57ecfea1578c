#include "reeb/interlevel.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "reeb/parallel.hpp"
#include "reeb/union_find.hpp"

namespace reeb {

std::uint64_t ComponentKey::stable_id() const {
  // FNV-1a over the member descriptors
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(0x6e);
  for (int n : nodes) mix(std::uint64_t(n) + 1);
  mix(0x65);
  for (int e : edges) mix(std::uint64_t(e) + 1);
  return h;
}

std::string ComponentKey::str(const ReebGraph& g) const {
  std::string s = "{";
  for (int n : nodes) s += "n:" + g.nodes[n].id + " ";
  for (int e : edges) s += "e:" + std::to_string(e) + " ";
  s += "}";
  return s;
}

bool ComponentKey::contains_node(int n) const {
  return std::binary_search(nodes.begin(), nodes.end(), n);
}
bool ComponentKey::contains_edge(int e) const {
  return std::binary_search(edges.begin(), edges.end(), e);
}

namespace {

// an edge has an interior fragment in [lo, hi] iff its open span meets the
// closed interval
bool edge_has_fragment(const ReebGraph& g, int e, const Interval& iv) {
  const Rat& elo = g.nodes[g.edges[e].lower].h;
  const Rat& ehi = g.nodes[g.edges[e].upper].h;
  return iv.lo < ehi && iv.hi > elo;
}

}  // namespace

InterlevelPartition interlevel_components(const ReebGraph& g, const Interval& iv) {
  int N = int(g.nodes.size()), E = int(g.edges.size());
  UnionFind uf(N + E);
  std::vector<bool> node_in(N, false), edge_in(E, false);
  for (int v = 0; v < N; ++v) node_in[v] = iv.contains(g.nodes[v].h);
  for (int e = 0; e < E; ++e) edge_in[e] = edge_has_fragment(g, e, iv);
  for (int e = 0; e < E; ++e) {
    if (!edge_in[e]) continue;
    if (node_in[g.edges[e].lower]) uf.unite(N + e, g.edges[e].lower);
    if (node_in[g.edges[e].upper]) uf.unite(N + e, g.edges[e].upper);
  }
  // collect components keyed by their sorted member lists
  std::map<int, ComponentKey> by_root;
  for (int v = 0; v < N; ++v)
    if (node_in[v]) by_root[uf.find(v)].nodes.push_back(v);
  for (int e = 0; e < E; ++e)
    if (edge_in[e]) by_root[uf.find(N + e)].edges.push_back(e);

  InterlevelPartition part;
  part.iv = iv;
  std::vector<std::pair<ComponentKey, int>> keyed;
  for (auto& [root, key] : by_root) {
    std::sort(key.nodes.begin(), key.nodes.end());
    std::sort(key.edges.begin(), key.edges.end());
    keyed.push_back({key, root});
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<int, int> root_to_idx;
  for (int i = 0; i < int(keyed.size()); ++i) {
    part.components.push_back(keyed[i].first);
    root_to_idx[keyed[i].second] = i;
  }
  part.node_comp.assign(N, -1);
  part.edge_comp.assign(E, -1);
  for (int v = 0; v < N; ++v)
    if (node_in[v]) part.node_comp[v] = root_to_idx[uf.find(v)];
  for (int e = 0; e < E; ++e)
    if (edge_in[e]) part.edge_comp[e] = root_to_idx[uf.find(N + e)];
  return part;
}

int InterlevelPartition::component_of(const ReebGraph& g, const Point& p) const {
  if (!iv.contains(point_height(g, p))) return -1;
  if (p.is_node()) return node_comp[p.node];
  return edge_comp[p.edge];
}

const ComponentKey& InterlevelPartition::key_of(const ReebGraph& g,
                                                const Point& p) const {
  int c = component_of(g, p);
  if (c < 0) throw std::invalid_argument("point outside interlevel");
  return components[c];
}

bool connected_in_interlevel(const ReebGraph& g, const Point& p, const Point& q,
                             const Interval& iv) {
  InterlevelPartition part = interlevel_components(g, iv);
  int cp = part.component_of(g, p);
  int cq = part.component_of(g, q);
  if (cp < 0 || cq < 0) throw std::invalid_argument("point outside interlevel");
  return cp == cq;
}

std::pair<Rat, Interval> path_height_distance_interval(const ReebGraph& g,
                                                       const Point& p,
                                                       const Point& q) {
  Rat hp = point_height(g, p), hq = point_height(g, q);
  Rat lo_need = min(hp, hq), hi_need = max(hp, hq);
  std::vector<Rat> cand = critical_heights(g);
  cand.push_back(hp);
  cand.push_back(hq);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  std::optional<std::pair<Rat, Interval>> best;
  for (const Rat& lo : cand) {
    if (lo > lo_need) break;
    for (const Rat& hi : cand) {
      if (hi < hi_need) continue;
      if (best && hi - lo >= best->first) continue;
      Interval iv(lo, hi);
      if (connected_in_interlevel(g, p, q, iv)) best = {hi - lo, iv};
    }
  }
  if (!best) throw std::logic_error("path_height_distance: graph disconnected?");
  return *best;
}

Rat path_height_distance(const ReebGraph& g, const Point& p, const Point& q) {
  return path_height_distance_interval(g, p, q).first;
}

namespace {

struct SweepContext {
  const ReebGraph& g;
  const std::vector<Point>& sites;
  std::vector<Rat> levels;              // candidate heights, sorted unique
  std::vector<int> nodes_by_h;          // node indices sorted by height
  std::vector<int> edges_by_lo;         // edge indices sorted by lower height
  std::vector<int> sites_by_h;          // site indices sorted by height

  explicit SweepContext(const ReebGraph& graph, const std::vector<Point>& ss)
      : g(graph), sites(ss) {
    levels = critical_heights(g);
    for (const Point& s : sites) levels.push_back(point_height(g, s));
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    nodes_by_h.resize(g.nodes.size());
    for (int i = 0; i < int(g.nodes.size()); ++i) nodes_by_h[i] = i;
    std::sort(nodes_by_h.begin(), nodes_by_h.end(), [&](int a, int b) {
      return g.nodes[a].h < g.nodes[b].h;
    });
    edges_by_lo.resize(g.edges.size());
    for (int i = 0; i < int(g.edges.size()); ++i) edges_by_lo[i] = i;
    std::sort(edges_by_lo.begin(), edges_by_lo.end(), [&](int a, int b) {
      return g.nodes[g.edges[a].lower].h < g.nodes[g.edges[b].lower].h;
    });
    sites_by_h.resize(sites.size());
    for (int i = 0; i < int(sites.size()); ++i) sites_by_h[i] = i;
    std::sort(sites_by_h.begin(), sites_by_h.end(), [&](int a, int b) {
      return point_height(g, sites[a]) < point_height(g, sites[b]);
    });
  }

  // One sweep for a fixed lower endpoint. update(i, j, width) reports the
  // first interval in which sites i and j become connected.
  template <class Update>
  void sweep(const Rat& lo, Update&& update) const {
    int N = int(g.nodes.size()), E = int(g.edges.size());
    UnionFind uf(N + E);
    std::vector<bool> node_in(N, false), edge_in(E, false);
    std::vector<std::vector<int>> root_sites(N + E);

    auto attach_site = [&](int si, int element, const Rat& hi) {
      int r = uf.find(element);
      for (int other : root_sites[r]) update(si, other, hi - lo);
      root_sites[r].push_back(si);
    };
    auto unite = [&](int a, int b, const Rat& hi) {
      int ra = uf.find(a), rb = uf.find(b);
      if (ra == rb) return;
      uf.unite(ra, rb);
      int rn = uf.find(ra);
      int ro = (rn == ra) ? rb : ra;
      for (int i : root_sites[rn])
        for (int j : root_sites[ro]) update(i, j, hi - lo);
      auto& into = root_sites[rn];
      auto& from = root_sites[ro];
      into.insert(into.end(), from.begin(), from.end());
      from.clear();
    };

    std::size_t np = 0, ep = 0, sp = 0;
    // skip material strictly below lo
    while (np < nodes_by_h.size() && g.nodes[nodes_by_h[np]].h < lo) ++np;
    while (sp < sites_by_h.size() &&
           point_height(g, sites[sites_by_h[sp]]) < lo)
      ++sp;

    for (const Rat& hi : levels) {
      if (hi < lo) continue;
      // nodes entering at heights <= hi
      while (np < nodes_by_h.size() && g.nodes[nodes_by_h[np]].h <= hi) {
        int v = nodes_by_h[np++];
        node_in[v] = true;
        for (int e : g.up_edges(v))
          if (edge_in[e]) unite(v, N + e, hi);
        for (int e : g.down_edges(v))
          if (edge_in[e]) unite(v, N + e, hi);
      }
      // edges whose lower endpoint lies strictly below hi
      while (ep < edges_by_lo.size() &&
             g.nodes[g.edges[edges_by_lo[ep]].lower].h < hi) {
        int e = edges_by_lo[ep++];
        if (!(lo < g.nodes[g.edges[e].upper].h)) continue;  // never enters
        edge_in[e] = true;
        if (node_in[g.edges[e].lower]) unite(N + e, g.edges[e].lower, hi);
        if (node_in[g.edges[e].upper]) unite(N + e, g.edges[e].upper, hi);
      }
      // sites at height <= hi
      while (sp < sites_by_h.size() &&
             point_height(g, sites[sites_by_h[sp]]) <= hi) {
        int si = sites_by_h[sp++];
        const Point& s = sites[si];
        int element = s.is_node() ? s.node : N + s.edge;
        attach_site(si, element, hi);
      }
    }
  }
};

using DMatrix = std::vector<std::vector<std::optional<Rat>>>;

void merge_min(DMatrix& into, const DMatrix& from) {
  for (std::size_t i = 0; i < into.size(); ++i)
    for (std::size_t j = 0; j < into.size(); ++j)
      if (from[i][j] && (!into[i][j] || *from[i][j] < *into[i][j]))
        into[i][j] = from[i][j];
}

std::vector<std::vector<Rat>> finalize(const ReebGraph& g,
                                       const std::vector<Point>& sites,
                                       DMatrix& d) {
  std::vector<std::vector<Rat>> out(sites.size(),
                                    std::vector<Rat>(sites.size(), Rat(0)));
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (i == j) continue;
      if (!d[i][j])
        throw std::logic_error("site_distance_matrix: disconnected sites");
      out[i][j] = *d[i][j];
    }
  return out;
}

}  // namespace

std::vector<std::vector<Rat>> site_distance_matrix_serial(
    const ReebGraph& g, const std::vector<Point>& sites) {
  SweepContext ctx(g, sites);
  DMatrix d(sites.size(), std::vector<std::optional<Rat>>(sites.size()));
  auto update = [&](int i, int j, const Rat& w) {
    if (!d[i][j] || w < *d[i][j]) {
      d[i][j] = w;
      d[j][i] = w;
    }
  };
  for (const Rat& lo : ctx.levels) ctx.sweep(lo, update);
  return finalize(g, sites, d);
}

std::vector<std::vector<Rat>> site_distance_matrix(
    const ReebGraph& g, const std::vector<Point>& sites) {
  if (!parallel_enabled()) return site_distance_matrix_serial(g, sites);
  SweepContext ctx(g, sites);
  DMatrix shared(sites.size(), std::vector<std::optional<Rat>>(sites.size()));
#ifdef REEB_HAVE_OPENMP
#pragma omp parallel
  {
    DMatrix local(sites.size(), std::vector<std::optional<Rat>>(sites.size()));
    auto update = [&](int i, int j, const Rat& w) {
      if (!local[i][j] || w < *local[i][j]) {
        local[i][j] = w;
        local[j][i] = w;
      }
    };
#pragma omp for schedule(dynamic)
    for (int li = 0; li < int(ctx.levels.size()); ++li)
      ctx.sweep(ctx.levels[li], update);
#pragma omp critical
    merge_min(shared, local);
  }
#else
  return site_distance_matrix_serial(g, sites);
#endif
  return finalize(g, sites, shared);
}

}  // namespace reeb
