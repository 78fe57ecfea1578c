#include "reeb/reeb_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace reeb {

int ReebGraph::node_index(const std::string& id) const {
  auto it = id_index_.find(id);
  return it == id_index_.end() ? -1 : it->second;
}

void ReebGraph::reindex() {
  id_index_.clear();
  for (int i = 0; i < int(nodes.size()); ++i) id_index_[nodes[i].id] = i;
  up_edges_.assign(nodes.size(), {});
  down_edges_.assign(nodes.size(), {});
  for (int e = 0; e < int(edges.size()); ++e) {
    if (edges[e].lower >= 0 && edges[e].lower < int(nodes.size()))
      up_edges_[edges[e].lower].push_back(e);
    if (edges[e].upper >= 0 && edges[e].upper < int(nodes.size()))
      down_edges_[edges[e].upper].push_back(e);
  }
}

Rat ReebGraph::min_height() const {
  Rat m = nodes.at(0).h;
  for (const auto& n : nodes) m = min(m, n.h);
  return m;
}

Rat ReebGraph::max_height() const {
  Rat m = nodes.at(0).h;
  for (const auto& n : nodes) m = max(m, n.h);
  return m;
}

Point make_node_point(const ReebGraph& g, int node) {
  Point p;
  p.node = node;
  p.h = g.nodes[node].h;
  return p;
}

Point make_edge_point(const ReebGraph& g, int edge, const Rat& h) {
  const auto& e = g.edges[edge];
  const Rat& lo = g.nodes[e.lower].h;
  const Rat& hi = g.nodes[e.upper].h;
  if (h == lo) return make_node_point(g, e.lower);
  if (h == hi) return make_node_point(g, e.upper);
  if (h < lo || h > hi)
    throw std::invalid_argument("point height outside edge span");
  Point p;
  p.edge = edge;
  p.h = h;
  return p;
}

Point make_point_by_id(const ReebGraph& g, const std::string& node_id) {
  int i = g.node_index(node_id);
  if (i < 0) throw std::invalid_argument("unknown node id: " + node_id);
  return make_node_point(g, i);
}

const Rat& point_height(const ReebGraph& g, const Point& p) {
  if (p.is_node()) return g.nodes[p.node].h;
  return p.h;
}

std::string point_str(const ReebGraph& g, const Point& p) {
  if (p.is_node()) return "node " + g.nodes[p.node].id;
  return "edge#" + std::to_string(p.edge) + " @ " + p.h.str();
}

bool point_less(const ReebGraph& g, const Point& a, const Point& b) {
  if (a.is_node() != b.is_node()) return a.is_node();
  if (a.is_node()) return g.nodes[a.node].id < g.nodes[b.node].id;
  if (a.edge != b.edge) return a.edge < b.edge;
  return a.h < b.h;
}

std::vector<Violation> validate(const ReebGraph& g) {
  std::vector<Violation> out;
  if (g.nodes.empty()) {
    out.push_back({"graph has no nodes"});
    return out;
  }
  std::set<std::string> seen;
  for (const auto& n : g.nodes) {
    if (!seen.insert(n.id).second)
      out.push_back({"duplicate node id: " + n.id});
  }
  for (int e = 0; e < int(g.edges.size()); ++e) {
    const auto& ed = g.edges[e];
    if (ed.lower < 0 || ed.lower >= int(g.nodes.size()) || ed.upper < 0 ||
        ed.upper >= int(g.nodes.size())) {
      out.push_back({"edge#" + std::to_string(e) + " references missing node"});
      continue;
    }
    if (ed.lower == ed.upper) {
      out.push_back({"self-loop at node " + g.nodes[ed.lower].id});
      continue;
    }
    if (!(g.nodes[ed.lower].h < g.nodes[ed.upper].h))
      out.push_back({"flat or inverted edge#" + std::to_string(e) + " (" +
                     g.nodes[ed.lower].id + "-" + g.nodes[ed.upper].id + ")"});
  }
  // connectivity (ignores direction)
  std::vector<int> comp(g.nodes.size(), -1);
  std::queue<int> q;
  comp[0] = 0;
  q.push(0);
  std::vector<std::vector<int>> adj(g.nodes.size());
  for (const auto& ed : g.edges) {
    if (ed.lower >= 0 && ed.upper >= 0 && ed.lower < int(g.nodes.size()) &&
        ed.upper < int(g.nodes.size())) {
      adj[ed.lower].push_back(ed.upper);
      adj[ed.upper].push_back(ed.lower);
    }
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (comp[w] < 0) {
        comp[w] = 0;
        q.push(w);
      }
  }
  for (int i = 0; i < int(g.nodes.size()); ++i)
    if (comp[i] < 0) {
      out.push_back({"disconnected: node " + g.nodes[i].id +
                     " unreachable from " + g.nodes[0].id});
      break;
    }
  return out;
}

bool is_valid(const ReebGraph& g) { return validate(g).empty(); }

std::vector<Rat> critical_heights(const ReebGraph& g) {
  std::vector<Rat> hs;
  hs.reserve(g.nodes.size());
  for (const auto& n : g.nodes) hs.push_back(n.h);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  return hs;
}

namespace {

std::string fresh_id(const std::set<std::string>& used, std::string base) {
  while (used.count(base)) base += "~";
  return base;
}

}  // namespace

Subdivision subdivide(const ReebGraph& g, const std::vector<Rat>& cuts) {
  Subdivision out;
  out.graph.name = g.name;
  out.graph.nodes = g.nodes;
  out.node_origin_node.resize(g.nodes.size());
  std::iota(out.node_origin_node.begin(), out.node_origin_node.end(), 0);
  out.node_origin_edge.assign(g.nodes.size(), -1);

  std::vector<Rat> sorted_cuts = cuts;
  std::sort(sorted_cuts.begin(), sorted_cuts.end());
  sorted_cuts.erase(std::unique(sorted_cuts.begin(), sorted_cuts.end()),
                    sorted_cuts.end());

  std::set<std::string> used;
  for (const auto& n : g.nodes) used.insert(n.id);

  for (int e = 0; e < int(g.edges.size()); ++e) {
    const auto& ed = g.edges[e];
    const Rat lo = g.nodes[ed.lower].h, hi = g.nodes[ed.upper].h;
    int prev = ed.lower;
    int k = 0;
    for (const Rat& c : sorted_cuts) {
      if (!(lo < c && c < hi)) continue;
      std::string id = fresh_id(
          used, g.nodes[ed.lower].id + "." + std::to_string(e) + "." +
                    std::to_string(k++));
      used.insert(id);
      int ni = int(out.graph.nodes.size());
      out.graph.nodes.push_back({id, c});
      out.node_origin_node.push_back(-1);
      out.node_origin_edge.push_back(e);
      out.graph.edges.push_back({prev, ni});
      out.edge_origin.push_back(e);
      prev = ni;
    }
    out.graph.edges.push_back({prev, ed.upper});
    out.edge_origin.push_back(e);
  }
  out.graph.reindex();
  return out;
}

Point Subdivision::to_new(const ReebGraph& original, const Point& p) const {
  if (p.is_node()) return make_node_point(graph, p.node);  // indices preserved
  for (int e = 0; e < int(graph.edges.size()); ++e) {
    if (edge_origin[e] != p.edge) continue;
    Interval s = graph.edge_span(e);
    if (s.contains(p.h)) return make_edge_point(graph, e, p.h);
  }
  throw std::logic_error("subdivision: point not covered");
}

Point Subdivision::to_old(const ReebGraph& original, const Point& p) const {
  if (p.is_node()) {
    int orig = node_origin_node[p.node];
    if (orig >= 0) return make_node_point(original, orig);
    return make_edge_point(original, node_origin_edge[p.node],
                           graph.nodes[p.node].h);
  }
  return make_edge_point(original, edge_origin[p.edge], p.h);
}

Canonicalization canonicalize(const ReebGraph& g) {
  int n = int(g.nodes.size());
  std::vector<std::vector<int>> up(n), down(n);
  for (int e = 0; e < int(g.edges.size()); ++e) {
    up[g.edges[e].lower].push_back(e);
    down[g.edges[e].upper].push_back(e);
  }
  std::vector<bool> removed(n, false);
  // a node is regular iff exactly one incoming and one outgoing edge
  std::vector<bool> keep(n, true);
  for (int v = 0; v < n; ++v)
    if (up[v].size() == 1 && down[v].size() == 1) keep[v] = false;

  Canonicalization out;
  out.graph.name = g.name;
  std::vector<int> new_index(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    new_index[v] = int(out.graph.nodes.size());
    out.graph.nodes.push_back(g.nodes[v]);
    out.node_origin.push_back(v);
  }
  // walk maximal chains: start from each kept node's up-edges
  std::vector<bool> edge_done(g.edges.size(), false);
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    for (int e0 : up[v]) {
      if (edge_done[e0]) continue;
      std::vector<int> chain;
      int e = e0;
      chain.push_back(e);
      edge_done[e] = true;
      int w = g.edges[e].upper;
      while (!keep[w]) {
        e = up[w][0];
        chain.push_back(e);
        edge_done[e] = true;
        w = g.edges[e].upper;
      }
      out.graph.edges.push_back({new_index[v], new_index[w]});
      out.edge_chain.push_back(chain);
    }
  }
  (void)removed;
  out.graph.reindex();
  // canonical order for deterministic downstream output
  std::vector<int> old_to_new, old_to_new_edge;
  canonical_sort(out.graph, &old_to_new, &old_to_new_edge);
  std::vector<int> node_origin_sorted(out.graph.nodes.size());
  for (int i = 0; i < int(out.node_origin.size()); ++i)
    node_origin_sorted[old_to_new[i]] = out.node_origin[i];
  out.node_origin = node_origin_sorted;
  std::vector<std::vector<int>> chains_sorted(out.edge_chain.size());
  for (int i = 0; i < int(out.edge_chain.size()); ++i)
    chains_sorted[old_to_new_edge[i]] = out.edge_chain[i];
  out.edge_chain = std::move(chains_sorted);
  return out;
}

Point Canonicalization::to_new(const ReebGraph& original, const Point& p) const {
  Rat h = point_height(original, p);
  // locate the new edge whose chain covers p
  for (int e = 0; e < int(graph.edges.size()); ++e) {
    for (int orig_e : edge_chain[e]) {
      const auto& oe = original.edges[orig_e];
      bool on_edge = !p.is_node() && p.edge == orig_e;
      bool on_node = p.is_node() && (p.node == oe.lower || p.node == oe.upper);
      if (on_edge || on_node) {
        Interval s = graph.edge_span(e);
        if (s.contains(h)) return make_edge_point(graph, e, h);
      }
    }
  }
  if (p.is_node()) {
    for (int i = 0; i < int(node_origin.size()); ++i)
      if (node_origin[i] == p.node) return make_node_point(graph, i);
  }
  throw std::logic_error("canonicalize: point not covered");
}

Point Canonicalization::to_old(const ReebGraph& original, const Point& p) const {
  if (p.is_node()) return make_node_point(original, node_origin[p.node]);
  for (int orig_e : edge_chain[p.edge]) {
    Interval s = original.edge_span(orig_e);
    if (s.contains(p.h)) return make_edge_point(original, orig_e, p.h);
  }
  throw std::logic_error("canonicalize: point not covered (to_old)");
}

namespace {

struct CanonCtx {
  const ReebGraph& g;
  int n;
  std::vector<int> height_rank;

  explicit CanonCtx(const ReebGraph& graph) : g(graph), n(int(graph.nodes.size())) {
    std::vector<Rat> hs = critical_heights(g);
    height_rank.resize(n);
    for (int v = 0; v < n; ++v) {
      height_rank[v] = int(
          std::lower_bound(hs.begin(), hs.end(), g.nodes[v].h) - hs.begin());
    }
  }

  // refine colors by sorted multisets of (direction, neighbor color)
  std::vector<int> refine(std::vector<int> color) const {
    for (;;) {
      std::vector<std::vector<std::pair<int, int>>> sig(n);
      for (const auto& e : g.edges) {
        sig[e.lower].push_back({0, color[e.upper]});
        sig[e.upper].push_back({1, color[e.lower]});
      }
      std::vector<std::pair<std::vector<int>, int>> keys(n);
      for (int v = 0; v < n; ++v) {
        std::sort(sig[v].begin(), sig[v].end());
        std::vector<int> k{color[v]};
        for (auto& [d, c] : sig[v]) {
          k.push_back(d);
          k.push_back(c);
        }
        keys[v] = {std::move(k), v};
      }
      auto sorted = keys;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> next(n);
      int c = -1;
      const std::vector<int>* prev = nullptr;
      for (auto& [k, v] : sorted) {
        if (!prev || *prev != k) ++c;
        next[v] = c;
        prev = &k;
      }
      if (next == color) return color;
      color = std::move(next);
    }
  }

  std::vector<int> initial_colors() const {
    std::vector<std::tuple<int, int, int, int>> key(n);
    std::vector<int> upd(n, 0), dnd(n, 0);
    for (const auto& e : g.edges) {
      upd[e.lower]++;
      dnd[e.upper]++;
    }
    std::vector<std::pair<std::tuple<int, int, int>, int>> keys(n);
    for (int v = 0; v < n; ++v)
      keys[v] = {{height_rank[v], dnd[v], upd[v]}, v};
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> color(n);
    int c = -1;
    const std::tuple<int, int, int>* prev = nullptr;
    for (auto& [k, v] : sorted) {
      if (!prev || *prev != k) ++c;
      color[v] = c;
      prev = &k;
    }
    (void)key;
    return color;
  }

  std::string certificate_for(const std::vector<int>& order) const {
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    std::string s;
    for (int i = 0; i < n; ++i) s += g.nodes[order[i]].h.str() + ";";
    std::vector<std::pair<int, int>> es;
    for (const auto& e : g.edges) es.push_back({pos[e.lower], pos[e.upper]});
    std::sort(es.begin(), es.end());
    for (auto& [a, b] : es)
      s += std::to_string(a) + "-" + std::to_string(b) + ";";
    return s;
  }

  // order nodes by (color, node id) when colors are discrete
  bool try_discrete(const std::vector<int>& color, std::vector<int>* order) const {
    std::vector<int> count(n, 0);
    for (int c : color) count[c]++;
    for (int v = 0; v < n; ++v)
      if (count[color[v]] > 1) return false;
    order->resize(n);
    std::vector<std::pair<int, int>> by_color(n);
    for (int v = 0; v < n; ++v) by_color[v] = {color[v], v};
    std::sort(by_color.begin(), by_color.end());
    for (int i = 0; i < n; ++i) (*order)[i] = by_color[i].second;
    return true;
  }

  void search(std::vector<int> color, std::string* best,
              std::vector<int>* best_order) const {
    color = refine(color);
    std::vector<int> order;
    if (try_discrete(color, &order)) {
      std::string cert = certificate_for(order);
      if (best->empty() || cert < *best) {
        *best = cert;
        *best_order = order;
      }
      return;
    }
    // first non-singleton color class
    int target = -1;
    std::vector<int> members;
    for (int c = 0;; ++c) {
      members.clear();
      for (int v = 0; v < n; ++v)
        if (color[v] == c) members.push_back(v);
      if (members.empty()) continue;
      if (members.size() > 1) {
        target = c;
        break;
      }
    }
    (void)target;
    for (int v : members) {
      std::vector<int> next = color;
      for (int w = 0; w < n; ++w)
        if (next[w] >= color[v]) next[w] += 1;
      next[v] = color[v];
      search(next, best, best_order);
    }
  }
};

}  // namespace

CanonicalLabeling canonical_labeling(const ReebGraph& g) {
  CanonCtx ctx(g);
  std::string best;
  std::vector<int> best_order;
  ctx.search(ctx.initial_colors(), &best, &best_order);
  return {best_order, best};
}

void canonical_sort(ReebGraph& g, std::vector<int>* old_to_new_node,
                    std::vector<int>* old_to_new_edge) {
  CanonicalLabeling lab = canonical_labeling(g);
  int n = int(g.nodes.size());
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[lab.order[i]] = i;
  std::vector<ReebGraph::Node> nodes(n);
  for (int v = 0; v < n; ++v) nodes[pos[v]] = g.nodes[v];
  g.nodes = std::move(nodes);
  for (auto& e : g.edges) {
    e.lower = pos[e.lower];
    e.upper = pos[e.upper];
  }
  int ne = int(g.edges.size());
  std::vector<int> eperm(ne);
  std::iota(eperm.begin(), eperm.end(), 0);
  std::sort(eperm.begin(), eperm.end(), [&](int a, int b) {
    return std::pair(g.edges[a].lower, g.edges[a].upper) <
           std::pair(g.edges[b].lower, g.edges[b].upper);
  });
  std::vector<ReebGraph::Edge> edges(ne);
  std::vector<int> epos(ne);
  for (int i = 0; i < ne; ++i) {
    edges[i] = g.edges[eperm[i]];
    epos[eperm[i]] = i;
  }
  g.edges = std::move(edges);
  g.reindex();
  if (old_to_new_node) *old_to_new_node = pos;
  if (old_to_new_edge) *old_to_new_edge = epos;
}

std::optional<std::vector<std::pair<std::string, std::string>>> is_isomorphic(
    const ReebGraph& f, const ReebGraph& g) {
  Canonicalization cf = canonicalize(f);
  Canonicalization cg = canonicalize(g);
  CanonicalLabeling lf = canonical_labeling(cf.graph);
  CanonicalLabeling lg = canonical_labeling(cg.graph);
  if (lf.certificate != lg.certificate) return std::nullopt;
  std::vector<std::pair<std::string, std::string>> bij;
  for (int i = 0; i < int(lf.order.size()); ++i)
    bij.push_back({cf.graph.nodes[lf.order[i]].id, cg.graph.nodes[lg.order[i]].id});
  return bij;
}

bool is_contour_tree(const ReebGraph& g) {
  if (!is_valid(g)) return false;
  return g.edges.size() + 1 == g.nodes.size();
}

bool is_merge_tree(const ReebGraph& g) {
  if (!is_contour_tree(g)) return false;
  std::vector<int> up(g.nodes.size(), 0);
  for (const auto& e : g.edges) up[e.lower]++;
  for (int c : up)
    if (c > 1) return false;
  return true;
}

Walk tree_geodesic(const ReebGraph& t, const Point& p, const Point& q) {
  if (!is_contour_tree(t))
    throw std::invalid_argument("geodesic requires contour tree");
  Walk w;
  w.start = p;
  w.end = q;
  if (p == q) return w;
  if (!p.is_node() && !q.is_node() && p.edge == q.edge) {
    w.steps.push_back({p.edge, p.h, q.h});
    return w;
  }
  // BFS over nodes; interior points anchor at both endpoints of their edge
  auto anchors = [&](const Point& x) -> std::vector<int> {
    if (x.is_node()) return {x.node};
    return {t.edges[x.edge].lower, t.edges[x.edge].upper};
  };
  int n = int(t.nodes.size());
  std::vector<int> parent(n, -2), via_edge(n, -1);
  std::queue<int> bfs;
  for (int a : anchors(p)) {
    if (parent[a] != -2) continue;
    parent[a] = -1;
    bfs.push(a);
  }
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    auto step = [&](int e, int to) {
      if (parent[to] != -2) return;
      parent[to] = v;
      via_edge[to] = e;
      bfs.push(to);
    };
    for (int e : t.up_edges(v)) step(e, t.edges[e].upper);
    for (int e : t.down_edges(v)) step(e, t.edges[e].lower);
  }
  // pick the target anchor minimizing... in a tree the injective path is
  // unique; choose q's anchor whose tree path does not re-enter q's edge.
  auto node_path = [&](int target) {
    std::vector<std::pair<int, int>> rev;  // (node, edge into node)
    int v = target;
    while (v != -1) {
      rev.push_back({v, via_edge[v]});
      v = parent[v];
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
  };
  std::vector<int> qa = anchors(q);
  std::vector<int> pa = anchors(p);
  // choose anchor pair (ap, aq) whose node path avoids passing through the
  // other anchor of p or q (that would mean the walk doubles back).
  for (int aq : qa) {
    if (parent[aq] == -2) continue;
    auto path = node_path(aq);
    int ap = path.front().first;
    bool ok = true;
    for (int i = 1; i + 1 < int(path.size()); ++i) {
      for (int other : qa)
        if (path[i].first == other) ok = false;
      for (int other : pa)
        if (path[i].first == other) ok = false;
    }
    if (int(path.size()) >= 2) {
      for (int other : pa)
        if (path.back().first == other && !q.is_node()) ok = false;
    }
    if (!ok) continue;
    Walk cand;
    cand.start = p;
    cand.end = q;
    if (!p.is_node()) cand.steps.push_back({p.edge, p.h, t.nodes[ap].h});
    for (int i = 1; i < int(path.size()); ++i) {
      int e = path[i].second;
      cand.steps.push_back(
          {e, t.nodes[path[i - 1].first].h, t.nodes[path[i].first].h});
    }
    if (!q.is_node()) {
      // do not traverse q's edge twice: the final partial step runs from aq
      cand.steps.push_back({q.edge, t.nodes[aq].h, q.h});
    }
    // drop degenerate steps (zero-length partials at shared anchors)
    std::vector<WalkStep> steps;
    for (auto& s : cand.steps)
      if (s.from_h != s.to_h) steps.push_back(s);
    cand.steps = std::move(steps);
    // validate injectivity cheaply: each edge visited at most once
    std::set<int> seen;
    bool injective = true;
    for (auto& s : cand.steps)
      if (!seen.insert(s.edge).second) injective = false;
    if (injective) return cand;
  }
  throw std::logic_error("tree_geodesic: no injective path found");
}

}  // namespace reeb
