#include "reeb/smoothing.hpp"

#include <algorithm>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

namespace {

int level_of(const std::vector<Rat>& levels, const Rat& h) {
  auto it = std::upper_bound(levels.begin(), levels.end(), h);
  return int(it - levels.begin()) - 1;
}

}  // namespace

const InterlevelPartition& SmoothedGraph::window_partition(const Interval& iv) const {
  auto key = std::make_pair(iv.lo, iv.hi);
  auto it = window_cache_.find(key);
  if (it == window_cache_.end())
    it = window_cache_.emplace(key, interlevel_components(source_, iv)).first;
  return it->second;
}

Point SmoothedGraph::zeta(const Point& p) const {
  if (p.is_node()) {
    for (int v = 0; v < int(thick_.vertices.size()); ++v)
      if (thick_.vertex_prov[v].g_node == p.node && thick_.vertex_prov[v].copy == 0)
        return quot_.map.vertex_image[v];
    throw std::logic_error("zeta: center vertex missing");
  }
  for (int e = 0; e < int(thick_.edges.size()); ++e) {
    const auto& pr = thick_.edge_prov[e];
    if (pr.g_edge != p.edge || pr.copy != 0) continue;
    const Rat& lo = thick_.vertices[thick_.edges[e][0]].h;
    const Rat& hi = thick_.vertices[thick_.edges[e][1]].h;
    if (min(lo, hi) <= p.h && p.h <= max(lo, hi))
      return quot_.map.edge_point_image(graph, e, p.h);
  }
  throw std::logic_error("zeta: center edge missing");
}

Point SmoothedGraph::point_for(const Rat& t, const ComponentKey& key) const {
  if (!key.nodes.empty()) {
    int p = key.nodes.front();
    const Rat& hp = source_.nodes[p].h;
    if (t == hp) {
      for (int v = 0; v < int(thick_.vertices.size()); ++v)
        if (thick_.vertex_prov[v].g_node == p && thick_.vertex_prov[v].copy == 0)
          return quot_.map.vertex_image[v];
      throw std::logic_error("point_for: center vertex missing");
    }
    int want_copy = (t < hp) ? -1 : +1;
    for (int e = 0; e < int(thick_.edges.size()); ++e) {
      const auto& pr = thick_.edge_prov[e];
      if (pr.g_node != p || pr.copy != want_copy) continue;
      const Rat& lo = thick_.vertices[thick_.edges[e][0]].h;
      const Rat& hi = thick_.vertices[thick_.edges[e][1]].h;
      if (min(lo, hi) <= t && t <= max(lo, hi))
        return quot_.map.edge_point_image(graph, e, t);
    }
    throw std::logic_error("point_for: vertical edge missing");
  }
  if (key.edges.empty()) throw std::invalid_argument("point_for: empty component");
  int ge = key.edges.front();
  for (int e = 0; e < int(thick_.edges.size()); ++e) {
    const auto& pr = thick_.edge_prov[e];
    if (pr.g_edge != ge) continue;
    const Rat& lo = thick_.vertices[thick_.edges[e][0]].h;
    const Rat& hi = thick_.vertices[thick_.edges[e][1]].h;
    if (min(lo, hi) < t && t < max(lo, hi))
      return quot_.map.edge_point_image(graph, e, t);
  }
  // fall back to closed spans (t at a copy endpoint)
  for (int e = 0; e < int(thick_.edges.size()); ++e) {
    const auto& pr = thick_.edge_prov[e];
    if (pr.g_edge != ge) continue;
    const Rat& lo = thick_.vertices[thick_.edges[e][0]].h;
    const Rat& hi = thick_.vertices[thick_.edges[e][1]].h;
    if (min(lo, hi) <= t && t <= max(lo, hi))
      return quot_.map.edge_point_image(graph, e, t);
  }
  throw std::logic_error("point_for: no carrier edge at height");
}

ComponentKey SmoothedGraph::window_key(const Point& p) const {
  const Rat& t = point_height(graph, p);
  const InterlevelPartition& part = window_partition(Interval::around(t, delta));
  for (const auto& key : part.components)
    if (point_for(t, key) == p) return key;
  throw std::logic_error("window_key: smoothing point not matched");
}

bool SmoothedGraph::monotone_path_exists(const Point& from, const Point& to) const {
  const Rat& a = point_height(graph, from);
  const Rat& b = point_height(graph, to);
  if (a > b) return false;
  if (a == b) return from == to;
  if (!from.is_node() && !to.is_node() && from.edge == to.edge) return true;
  std::vector<bool> seen(graph.nodes.size(), false);
  std::vector<int> stack;
  auto push = [&](int v) {
    if (graph.nodes[v].h <= b && !seen[v]) {
      seen[v] = true;
      stack.push_back(v);
    }
  };
  if (from.is_node())
    push(from.node);
  else {
    if (to.is_node() && graph.edges[from.edge].upper == to.node) return true;
    push(graph.edges[from.edge].upper);
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (to.is_node() && v == to.node) return true;
    for (int e : graph.up_edges(v)) {
      if (!to.is_node() && to.edge == e) return true;
      push(graph.edges[e].upper);
    }
  }
  return false;
}

Point SmoothedGraph::ascend_unique(const Point& from, const Rat& to_height) const {
  Point cur = from;
  if (point_height(graph, cur) > to_height)
    throw std::invalid_argument("ascend_unique: target below point");
  if (!cur.is_node()) {
    Interval s = graph.edge_span(cur.edge);
    if (to_height <= s.hi) return make_edge_point(graph, cur.edge, to_height);
    cur = make_node_point(graph, graph.edges[cur.edge].upper);
  }
  while (graph.nodes[cur.node].h < to_height) {
    const auto& ups = graph.up_edges(cur.node);
    if (ups.empty())
      throw std::invalid_argument("ascend_unique: no edge above point");
    if (ups.size() > 1)
      throw std::invalid_argument("ascend_unique: ascent not unique");
    int e = ups[0];
    if (to_height <= graph.nodes[graph.edges[e].upper].h)
      return make_edge_point(graph, e, to_height);
    cur = make_node_point(graph, graph.edges[e].upper);
  }
  return cur;
}

SmoothedGraph smooth(const ReebGraph& g, const Rat& delta) {
  if (delta < Rat(0)) throw std::invalid_argument("smoothing needs delta >= 0");
  if (!is_valid(g)) throw std::invalid_argument("smooth: invalid graph");
  SmoothedGraph out;
  out.source_ = g;
  out.source_.reindex();
  out.delta = delta;
  out.thick_ = thickened_complex(g, delta);
  out.quot_ = reeb_of(out.thick_);
  out.graph = out.quot_.graph;
  out.graph.reindex();
  return out;
}

// ---------------------------------------------------------------------------

int MergeTreeView::level_index_at_or_below(const Rat& h) const {
  int k = level_of(levels_, h);
  if (k < 0) throw std::invalid_argument("height below the graph");
  return k;
}

int MergeTreeView::class_root_of_point(const Point& p, int k) const {
  int anchor = p.is_node() ? p.node : source_.edges[p.edge].lower;
  int r = root_at_[k][anchor];
  if (r < 0) throw std::logic_error("class_root_of_point: anchor not yet swept");
  return r;
}

Point MergeTreeView::i_map(const Point& p) const {
  const Rat& h = point_height(source_, p);
  int k = level_index_at_or_below(h);
  int r = class_root_of_point(p, k);
  int pending = pending_at_[k].at(r);
  if (tree.nodes[pending].h == h) return make_node_point(tree, pending);
  int e = tree.up_edges(pending).at(0);
  return make_edge_point(tree, e, h);
}

Point MergeTreeView::rho(const Point& p) const {
  if (!source_is_merge_tree)
    throw std::invalid_argument("rho requires a merge tree source");
  int k, root;
  Rat h;
  if (p.is_node()) {
    auto [kk, rr] = tree_node_class_[p.node];
    k = kk;
    root = rr;
    h = tree.nodes[p.node].h;
  } else {
    h = p.h;
    k = level_index_at_or_below(h);
    int lower_tree_node = tree.edges[p.edge].lower;
    auto [kk, rr] = tree_node_class_[lower_tree_node];
    // the class root recorded at arc birth, updated to the snapshot at k
    root = root_at_[k][rr];
    (void)kk;
  }
  // unique source point at height h inside the class
  std::vector<Point> found;
  const Rat& level_h = levels_[k];
  bool at_level = (h == level_h);
  for (int v = 0; v < int(source_.nodes.size()); ++v) {
    if (source_.nodes[v].h != h) continue;
    if (at_level && root_at_[k][v] == root) found.push_back(make_node_point(source_, v));
  }
  for (int e = 0; e < int(source_.edges.size()); ++e) {
    Interval s = source_.edge_span(e);
    if (!(s.lo < h && h < s.hi)) continue;
    if (root_at_[k][source_.edges[e].lower] == root)
      found.push_back(make_edge_point(source_, e, h));
  }
  if (found.size() != 1)
    throw std::logic_error("rho: fiber point not unique (" +
                           std::to_string(found.size()) + ")");
  return found[0];
}

Point MergeTreeView::tree_ascend(const Point& p, const Rat& to_height) const {
  Point cur = p;
  if (point_height(tree, cur) > to_height)
    throw std::invalid_argument("tree_ascend: target below point");
  if (!cur.is_node()) {
    Interval s = tree.edge_span(cur.edge);
    if (to_height <= s.hi) return make_edge_point(tree, cur.edge, to_height);
    cur = make_node_point(tree, tree.edges[cur.edge].upper);
  }
  while (tree.nodes[cur.node].h < to_height) {
    const auto& ups = tree.up_edges(cur.node);
    if (ups.empty()) throw std::invalid_argument("tree_ascend: above the root");
    int e = ups[0];
    if (to_height <= tree.nodes[tree.edges[e].upper].h)
      return make_edge_point(tree, e, to_height);
    cur = make_node_point(tree, tree.edges[e].upper);
  }
  return cur;
}

MergeTreeView merge_tree_of(const ReebGraph& g) {
  if (!is_valid(g)) throw std::invalid_argument("merge_tree_of: invalid graph");
  MergeTreeView out;
  out.source_ = g;
  out.source_.reindex();
  out.m = g.max_height();
  out.source_is_merge_tree = is_merge_tree(g);
  out.levels_ = critical_heights(g);
  const auto& levels = out.levels_;
  int N = int(g.nodes.size()), L = int(levels.size());

  std::vector<int> vl(N);
  for (int v = 0; v < N; ++v) vl[v] = level_of(levels, g.nodes[v].h);

  UnionFind uf(N);
  std::vector<bool> added(N, false);
  std::map<int, int> pending;  // class root -> tree node
  out.root_at_.assign(L, std::vector<int>(N, -1));
  out.pending_at_.resize(L);

  auto new_tree_node = [&](const Rat& h, int k, int root) {
    int t = int(out.tree.nodes.size());
    out.tree.nodes.push_back({"t" + std::to_string(t), h});
    out.tree_node_class_.push_back({k, root});
    return t;
  };

  for (int k = 0; k < L; ++k) {
    //  previous pending arcs, keyed by their old roots
    std::vector<std::pair<int, int>> olds(pending.begin(), pending.end());
    for (int v = 0; v < N; ++v)
      if (vl[v] == k) added[v] = true;
    for (int e = 0; e < int(g.edges.size()); ++e) {
      int u = g.edges[e].lower, w = g.edges[e].upper;
      if (vl[w] == k) uf.unite(u, w);
    }
    // regroup old arcs under the new roots
    std::map<int, std::vector<int>> groups;  // new root -> old pending nodes
    for (auto& [old_root, tnode] : olds) groups[uf.find(old_root)].push_back(tnode);
    pending.clear();
    for (auto& [root, arcs] : groups) {
      if (arcs.size() >= 2) {
        int t = new_tree_node(levels[k], k, root);
        for (int a : arcs) out.tree.edges.push_back({a, t});
        pending[root] = t;
      } else {
        pending[root] = arcs[0];
      }
    }
    // births
    for (int v = 0; v < N; ++v) {
      if (vl[v] != k) continue;
      int r = uf.find(v);
      if (!pending.count(r)) pending[r] = new_tree_node(levels[k], k, r);
    }
    for (int v = 0; v < N; ++v)
      if (added[v]) out.root_at_[k][v] = uf.find(v);
    out.pending_at_[k] = pending;
  }
  // close the remaining arc at m
  if (pending.size() != 1) throw std::logic_error("merge sweep: not connected");
  auto [root, tnode] = *pending.begin();
  if (out.tree.nodes[tnode].h < out.m) {
    int t = new_tree_node(out.m, L - 1, root);
    out.tree.edges.push_back({tnode, t});
  }
  out.tree.reindex();
  return out;
}

bool i_injective(const ReebGraph& g) {
  if (!is_valid(g)) throw std::invalid_argument("i_injective: invalid graph");
  std::vector<Rat> levels = critical_heights(g);
  int N = int(g.nodes.size()), L = int(levels.size());
  std::vector<int> vl(N);
  for (int v = 0; v < N; ++v) vl[v] = level_of(levels, g.nodes[v].h);
  UnionFind uf(N);
  for (int k = 0; k < L; ++k) {
    for (int e = 0; e < int(g.edges.size()); ++e)
      if (vl[g.edges[e].upper] == k) uf.unite(g.edges[e].lower, g.edges[e].upper);
    // boundary points at the level itself
    std::map<int, int> count;
    for (int v = 0; v < N; ++v)
      if (vl[v] == k) count[uf.find(v)]++;
    for (int e = 0; e < int(g.edges.size()); ++e)
      if (vl[g.edges[e].lower] < k && vl[g.edges[e].upper] > k)
        count[uf.find(g.edges[e].lower)]++;
    for (auto& [r, c] : count)
      if (c >= 2) return false;
    // boundary points across the open slab above
    if (k + 1 < L) {
      count.clear();
      for (int e = 0; e < int(g.edges.size()); ++e)
        if (vl[g.edges[e].lower] <= k && vl[g.edges[e].upper] >= k + 1)
          count[uf.find(g.edges[e].lower)]++;
      for (auto& [r, c] : count)
        if (c >= 2) return false;
    }
  }
  return true;
}

Point KappaDelta::apply(const Point& smoothing_point) const {
  const Rat& t = point_height(smoothing.graph, smoothing_point);
  ComponentKey key = smoothing.window_key(smoothing_point);
  const ReebGraph& g = smoothing.source();
  Point member;
  if (!key.nodes.empty()) {
    member = make_node_point(g, key.nodes.front());
  } else {
    int e = key.edges.front();
    Interval s = g.edge_span(e);
    Rat lo = max(s.lo, t - delta), hi = min(s.hi, t + delta);
    member = make_edge_point(g, e, lo == hi ? lo : mid(lo, hi));
  }
  Rat target = min(t + delta, merge_view.m);
  return merge_view.tree_ascend(merge_view.i_map(member), target);
}

Point KappaDelta::apply_rho(const Point& smoothing_point) const {
  return merge_view.rho(apply(smoothing_point));
}

KappaDelta kappa_delta(const ReebGraph& g, const Rat& delta) {
  if (!is_merge_tree(g))
    throw std::invalid_argument("kappa_delta requires a merge tree");
  return KappaDelta{smooth(g, delta), merge_tree_of(g), delta};
}

bool check_thickening_shift(const ReebGraph& g, const Rat& delta,
                            const std::vector<ShiftSample>& samples) {
  if (!is_merge_tree(g))
    throw std::invalid_argument("check_thickening_shift requires a merge tree");
  MergeTreeView mt = merge_tree_of(g);
  for (const auto& s : samples) {
    const Rat& hp = point_height(g, s.p);
    bool admissible =
        (s.delta_prime == delta) ||
        (hp == mt.m && s.delta_prime.abs() <= delta);
    if (!admissible)
      throw std::invalid_argument("thickening-shift sample not admissible at " +
                                  point_str(g, s.p));
    Rat t = hp - s.delta_prime;
    Rat target = min(t + delta, mt.m);
    Point back = mt.rho(mt.tree_ascend(mt.i_map(s.p), target));
    if (!(back == s.p)) return false;
  }
  return true;
}

}  // namespace reeb
