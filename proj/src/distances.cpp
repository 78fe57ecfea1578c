#include "reeb/distances.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <queue>
#include <set>
#include <stdexcept>

#include "reeb/smoothing.hpp"
#include "reeb/transforms.hpp"

namespace reeb {

std::vector<Rat> candidate_deltas(const ReebGraph& F, const ReebGraph& G) {
  // pairwise differences over the joint criticals and their half-heights,
  // then halves of those differences again; a superset is sound because the
  // decisions are monotone in delta
  std::vector<Rat> hs = critical_heights(F);
  for (const Rat& h : critical_heights(G)) hs.push_back(h);
  std::size_t n = hs.size();
  for (std::size_t i = 0; i < n; ++i) hs.push_back(hs[i].half());
  std::vector<Rat> out{Rat(0)};
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      Rat d = (hs[i] - hs[j]).abs();
      out.push_back(d);
      out.push_back(d.half());
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::vector<Rat> sorted_unique(std::vector<Rat> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Rat> decision_grid(const ReebGraph& F, const ReebGraph& G,
                               const Rat& delta) {
  std::vector<Rat> base = critical_heights(F);
  for (const Rat& c : critical_heights(G)) base.push_back(c);
  std::vector<Rat> grid;
  for (const Rat& c : base)
    for (const Rat& s :
         {-(delta + delta), -delta, Rat(0), delta, delta + delta})
      grid.push_back(c + s);
  return sorted_unique(grid);
}

struct PartitionCache {
  const ReebGraph& g;
  std::map<std::pair<Rat, Rat>, InterlevelPartition> cache;
  explicit PartitionCache(const ReebGraph& graph) : g(graph) {}
  const InterlevelPartition& at(const Interval& iv) {
    auto key = std::make_pair(iv.lo, iv.hi);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, interlevel_components(g, iv)).first;
    return it->second;
  }
};

// one side of the merge decision: the subdivided tree, its leaves, and the
// ascent-propagated assignment of smoothing points
struct MergeSide {
  const ReebGraph& A;      // original
  const ReebGraph& B;      // the other graph
  Subdivision S;
  const SmoothedGraph& smB;
  PartitionCache& pcB;
  std::vector<Point> original_point;          // per S vertex
  std::vector<int> leaves;                    // S vertices with no down edge
  std::vector<std::vector<int>> chain;        // per leaf: vertices on the ascent
  std::vector<std::vector<int>> leaf_domains;  // component index per leaf

  // current assignment state
  std::vector<Point> assigned_pt;   // smoothing point per S vertex
  std::vector<int> assigned_comp;   // component index per S vertex (-1 unset)
  std::vector<int> assign_count;    // how many leaves fixed this vertex

  MergeSide(const ReebGraph& a, const ReebGraph& b, const std::vector<Rat>& grid,
            const SmoothedGraph& sm, PartitionCache& pc)
      : A(a), B(b), S(subdivide(a, grid)), smB(sm), pcB(pc) {
    int n = int(S.graph.nodes.size());
    original_point.resize(n);
    for (int v = 0; v < n; ++v)
      original_point[v] = S.to_old(A, make_node_point(S.graph, v));
    for (int v = 0; v < n; ++v)
      if (S.graph.down_edges(v).empty()) leaves.push_back(v);
    chain.resize(leaves.size());
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      int v = leaves[l];
      chain[l].push_back(v);
      while (!S.graph.up_edges(v).empty()) {
        v = S.graph.edges[S.graph.up_edges(v)[0]].upper;
        chain[l].push_back(v);
      }
    }
    assigned_pt.resize(n);
    assigned_comp.assign(n, -1);
    assign_count.assign(n, 0);
  }

  // false when some vertex has an empty window in the other graph
  bool windows_nonempty() {
    for (int v = 0; v < int(S.graph.nodes.size()); ++v) {
      Interval w = Interval::around(S.graph.nodes[v].h, smB.delta);
      if (pcB.at(w).count() == 0) return false;
    }
    return true;
  }

  void build_leaf_domains() {
    leaf_domains.resize(leaves.size());
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      Interval w = Interval::around(S.graph.nodes[leaves[l]].h, smB.delta);
      int n = pcB.at(w).count();
      for (int c = 0; c < n; ++c) leaf_domains[l].push_back(c);
    }
  }

  // try to fix the leaf to its domain choice and propagate the unique ascent;
  // returns the vertices that were newly set (for undo), or nullopt on clash
  std::optional<std::vector<int>> push_leaf(int leaf_idx, int comp) {
    int leaf = leaves[leaf_idx];
    Interval w = Interval::around(S.graph.nodes[leaf].h, smB.delta);
    const auto& part = pcB.at(w);
    Point P = smB.point_for(S.graph.nodes[leaf].h, part.components[comp]);
    std::vector<int> touched;
    for (int v : chain[leaf_idx]) {
      Point Pv = (v == leaf) ? P : smB.ascend_unique(P, S.graph.nodes[v].h);
      if (assigned_comp[v] >= 0 || assign_count[v] > 0) {
        if (!(assigned_pt[v] == Pv)) {
          for (int u : touched) {
            assign_count[u] = 0;
            assigned_comp[u] = -1;
          }
          return std::nullopt;
        }
        assign_count[v]++;
        touched.push_back(v);
        continue;
      }
      assigned_pt[v] = Pv;
      assigned_comp[v] = 0;  // marks set; the key is recovered on demand
      assign_count[v] = 1;
      touched.push_back(v);
    }
    return touched;
  }

  void pop_leaf(const std::vector<int>& touched) {
    for (int v : touched) {
      if (--assign_count[v] == 0) assigned_comp[v] = -1;
    }
  }

  bool fully_assigned() const {
    for (int c : assigned_comp)
      if (c < 0) return false;
    return true;
  }
};

// the component key a smoothing point stands for (window member set)
ComponentKey key_of_point(const SmoothedGraph& sm, const Point& p) {
  return sm.window_key(p);
}

}  // namespace

MergeDecision interleaving_decision_merge(const ReebGraph& F, const ReebGraph& G,
                                          const Rat& delta) {
  if (!is_merge_tree(F) || !is_merge_tree(G))
    throw std::invalid_argument("interleaving decision requires merge trees");
  if (delta < Rat(0)) return {false, std::nullopt};

  std::vector<Rat> grid = decision_grid(F, G, delta);
  SmoothedGraph smF = smooth(F, delta), smG = smooth(G, delta);
  PartitionCache pcF(F), pcG(G);

  MergeSide sideF(F, G, grid, smG, pcG);
  MergeSide sideG(G, F, grid, smF, pcF);
  if (!sideF.windows_nonempty() || !sideG.windows_nonempty())
    return {false, std::nullopt};
  sideF.build_leaf_domains();
  sideG.build_leaf_domains();

  // round-trip check of one vertex of side X against the other side's full
  // or partial assignment
  auto round_trip_ok = [&](MergeSide& me, MergeSide& other, int v) -> bool {
    // me vertex v: component of the window around it in the other ORIGINAL
    // graph; every other-side vertex y inside it with an assignment must map
    // into K_x(me 2delta window)
    const Rat& fx = me.S.graph.nodes[v].h;
    Interval big = Interval::around(fx, delta + delta);
    const auto& partMe = (&me == &sideF) ? pcF.at(big) : pcG.at(big);
    int cx = partMe.component_of(me.A, me.original_point[v]);
    if (cx < 0) return false;
    ComponentKey my_key = key_of_point(me.smB, me.assigned_pt[v]);
    for (int w = 0; w < int(other.S.graph.nodes.size()); ++w) {
      if (other.assigned_comp[w] < 0) continue;
      const Point& y = other.original_point[w];
      const Rat& gy = point_height(other.A, y);
      if ((gy - fx).abs() > delta) continue;
      bool inside = y.is_node() ? my_key.contains_node(y.node)
                                : my_key.contains_edge(y.edge);
      if (!inside) continue;
      ComponentKey yk = key_of_point(other.smB, other.assigned_pt[w]);
      for (int n : yk.nodes)
        if (partMe.node_comp[n] != cx) return false;
      for (int e : yk.edges)
        if (partMe.edge_comp[e] != cx) return false;
    }
    return true;
  };

  // after a leaf push on `me`, check the round trips that may have changed:
  // the touched vertices on me's side, plus every other-side vertex whose
  // window component contains one of them
  auto consistent_after = [&](MergeSide& me, MergeSide& other,
                              const std::vector<int>& touched) -> bool {
    for (int v : touched)
      if (!round_trip_ok(me, other, v)) return false;
    for (int w = 0; w < int(other.S.graph.nodes.size()); ++w) {
      if (other.assigned_comp[w] < 0) continue;
      if (!round_trip_ok(other, me, w)) return false;
    }
    return true;
  };

  MergeDecision result{false, std::nullopt};
  long nodes = 0;

  std::function<bool(std::size_t)> searchG = [&](std::size_t gl) -> bool {
    if (gl == sideG.leaves.size()) return true;
    for (int comp : sideG.leaf_domains[gl]) {
      if (++nodes < 0) return false;
      auto touched = sideG.push_leaf(int(gl), comp);
      if (!touched) continue;
      if (consistent_after(sideG, sideF, *touched) && searchG(gl + 1))
        return true;
      sideG.pop_leaf(*touched);
    }
    return false;
  };
  std::function<bool(std::size_t)> searchF = [&](std::size_t fl) -> bool {
    if (fl == sideF.leaves.size()) return searchG(0);
    for (int comp : sideF.leaf_domains[fl]) {
      auto touched = sideF.push_leaf(int(fl), comp);
      if (!touched) continue;
      // at this stage psi is unassigned, so only propagation clashes prune
      if (searchF(fl + 1)) return true;
      sideF.pop_leaf(*touched);
    }
    return false;
  };

  if (searchF(0)) {
    InterleavingPair p;
    p.delta = delta;
    p.grid = grid;
    for (int v = 0; v < int(sideF.S.graph.nodes.size()); ++v)
      p.phi.push_back({sideF.original_point[v],
                       key_of_point(sideF.smB, sideF.assigned_pt[v])});
    for (int v = 0; v < int(sideG.S.graph.nodes.size()); ++v)
      p.psi.push_back({sideG.original_point[v],
                       key_of_point(sideG.smB, sideG.assigned_pt[v])});
    result.exists = true;
    result.witness = std::move(p);
  }
  return result;
}

std::pair<Rat, InterleavingPair> interleaving_distance_merge(const ReebGraph& F,
                                                             const ReebGraph& G) {
  std::vector<Rat> cand = candidate_deltas(F, G);
  // monotone in delta: binary search the smallest admitting an interleaving
  int lo = 0, hi = int(cand.size()) - 1;
  // the largest candidate always works (it reaches the trivial bound)
  std::optional<InterleavingPair> best;
  {
    MergeDecision d = interleaving_decision_merge(F, G, cand[hi]);
    if (!d.exists)
      throw std::logic_error("interleaving search: no candidate admits a pair");
    best = d.witness;
  }
  while (lo < hi) {
    int mid_i = (lo + hi) / 2;
    MergeDecision d = interleaving_decision_merge(F, G, cand[mid_i]);
    if (d.exists) {
      hi = mid_i;
      best = d.witness;
    } else {
      lo = mid_i + 1;
    }
  }
  return {cand[lo], *best};
}

// ---------------------------------------------------------------------------
// map-pair decisions

namespace {

struct PairSearch {
  const ReebGraph& F;
  const ReebGraph& G;
  Rat delta;
  bool metric_mode;  // distortion: pairwise |d_f - d_g| <= 2 delta pruning
  SearchBudget budget;

  Subdivision SF, SG;
  PartitionCache pcF, pcG;
  long nodes = 0;
  bool exhausted = false;

  // variables: vertex images on both sides, with each cell's walk chosen
  // right after its later endpoint
  struct Var {
    int kind;  // 0: phi vertex, 1: psi vertex, 2: phi cell, 3: psi cell
    int index;
  };
  std::vector<Var> order;
  std::vector<int> phi_assign, psi_assign;         // image vertex or -1
  std::vector<std::vector<int>> phi_dom, psi_dom;  // candidate image vertices
  std::vector<int> phi_walk, psi_walk;             // chosen walk index or -1
  std::vector<std::vector<Walk>> phi_walks, psi_walks;

  // crossing requirements: phi walks crossing a G vertex jb pin the window
  // component psi(jb) must land in, and symmetrically
  std::vector<int> req_for_psi, req_for_phi;  // component index or -1

  // window component tables per source height: the component of every image
  // vertex and every original target edge in the window around that height
  struct WindowTable {
    std::vector<int> comp_of_node;  // original target nodes
    std::vector<int> comp_of_edge;  // original target edges
    std::vector<int> comp_of_img;   // subdivided target vertices
    Interval iv{Rat(0), Rat(0)};
  };
  std::map<Rat, WindowTable> winG_;  // over G, keyed by F-side height
  std::map<Rat, WindowTable> winF_;  // over F, keyed by G-side height

  // metric mode data
  std::vector<std::vector<Rat>> dF, dG;

  PairSearch(const ReebGraph& f, const ReebGraph& g, const Rat& d,
             const std::vector<Rat>& grid, bool metric, SearchBudget b)
      : F(f),
        G(g),
        delta(d),
        metric_mode(metric),
        budget(b),
        SF(subdivide(f, grid)),
        SG(subdivide(g, grid)),
        pcF(f),
        pcG(g) {
    phi_assign.assign(SF.graph.nodes.size(), -1);
    psi_assign.assign(SG.graph.nodes.size(), -1);
    phi_walk.assign(SF.graph.edges.size(), -1);
    psi_walk.assign(SG.graph.edges.size(), -1);
    phi_walks.resize(SF.graph.edges.size());
    psi_walks.resize(SG.graph.edges.size());
    req_for_psi.assign(SG.graph.nodes.size(), -1);
    req_for_phi.assign(SF.graph.nodes.size(), -1);
    build_domains();
    if (!metric) propagate_forced_crossings();
    build_order();
    if (metric_mode) {
      std::vector<Point> sitesF, sitesG;
      for (int v = 0; v < int(SF.graph.nodes.size()); ++v)
        sitesF.push_back(SF.to_old(F, make_node_point(SF.graph, v)));
      for (int v = 0; v < int(SG.graph.nodes.size()); ++v)
        sitesG.push_back(SG.to_old(G, make_node_point(SG.graph, v)));
      dF = site_distance_matrix(F, sitesF);
      dG = site_distance_matrix(G, sitesG);
    }
  }

  Point original_vertex(int side, int v) const {
    return side == 0 ? SF.to_old(F, make_node_point(SF.graph, v))
                     : SG.to_old(G, make_node_point(SG.graph, v));
  }

  // table of window components over the target of side `side`
  const WindowTable& window(int side, const Rat& h) {
    auto& store = side == 0 ? winG_ : winF_;
    auto it = store.find(h);
    if (it != store.end()) return it->second;
    const ReebGraph& B = side == 0 ? G : F;
    const Subdivision& SB = side == 0 ? SG : SF;
    PartitionCache& pc = side == 0 ? pcG : pcF;
    WindowTable t;
    t.iv = Interval::around(h, delta);
    const auto& part = pc.at(t.iv);
    t.comp_of_node.resize(B.nodes.size());
    for (int n = 0; n < int(B.nodes.size()); ++n) t.comp_of_node[n] = part.node_comp[n];
    t.comp_of_edge = part.edge_comp;
    t.comp_of_img.resize(SB.graph.nodes.size());
    for (int w = 0; w < int(SB.graph.nodes.size()); ++w) {
      Point p = SB.to_old(B, make_node_point(SB.graph, w));
      t.comp_of_img[w] = part.component_of(B, p);
    }
    return store.emplace(h, std::move(t)).first->second;
  }

  int comp_of_point(const WindowTable& t, const ReebGraph& Borig, const Point& p) {
    if (!t.iv.contains(point_height(Borig, p))) return -1;
    if (p.is_node()) return t.comp_of_node[p.node];
    return t.comp_of_edge[p.edge];
  }

  void build_domains() {
    phi_dom.resize(SF.graph.nodes.size());
    psi_dom.resize(SG.graph.nodes.size());
    auto fill = [&](const ReebGraph& SA, const ReebGraph& SB,
                    std::vector<std::vector<int>>& dom) {
      for (int v = 0; v < int(SA.nodes.size()); ++v) {
        std::vector<std::pair<std::pair<Rat, std::string>, int>> opts;
        for (int w = 0; w < int(SB.nodes.size()); ++w) {
          Rat gap = (SA.nodes[v].h - SB.nodes[w].h).abs();
          if (gap > delta) continue;
          opts.push_back({{gap, SB.nodes[w].id}, w});
        }
        std::sort(opts.begin(), opts.end());
        for (auto& [k, w] : opts) dom[v].push_back(w);
      }
    };
    fill(SF.graph, SG.graph, phi_dom);
    fill(SG.graph, SF.graph, psi_dom);
  }

  void build_order() {
    std::vector<Var> verts;
    for (int v = 0; v < int(SF.graph.nodes.size()); ++v) verts.push_back({0, v});
    for (int v = 0; v < int(SG.graph.nodes.size()); ++v) verts.push_back({1, v});
    // middle-out: the tightly coupled mid-range variables come first
    Rat mid_h = mid(min(F.min_height(), G.min_height()),
                    max(F.max_height(), G.max_height()));
    auto vh = [&](const Var& a) -> const Rat& {
      return a.kind == 0 ? SF.graph.nodes[a.index].h : SG.graph.nodes[a.index].h;
    };
    std::sort(verts.begin(), verts.end(), [&](const Var& a, const Var& b) {
      Rat da = (vh(a) - mid_h).abs(), db = (vh(b) - mid_h).abs();
      if (da != db) return da < db;
      if (vh(a) != vh(b)) return vh(a) < vh(b);
      if (a.kind != b.kind) return a.kind < b.kind;
      return a.index < b.index;
    });
    std::vector<int> posF(SF.graph.nodes.size()), posG(SG.graph.nodes.size());
    for (int i = 0; i < int(verts.size()); ++i) {
      if (verts[i].kind == 0)
        posF[verts[i].index] = i;
      else
        posG[verts[i].index] = i;
    }
    std::vector<std::vector<Var>> after(verts.size());
    for (int e = 0; e < int(SF.graph.edges.size()); ++e)
      after[std::max(posF[SF.graph.edges[e].lower],
                     posF[SF.graph.edges[e].upper])]
          .push_back({2, e});
    for (int e = 0; e < int(SG.graph.edges.size()); ++e)
      after[std::max(posG[SG.graph.edges[e].lower],
                     posG[SG.graph.edges[e].upper])]
          .push_back({3, e});
    for (int i = 0; i < int(verts.size()); ++i) {
      order.push_back(verts[i]);
      for (const Var& c : after[i]) order.push_back(c);
    }
  }

  static std::vector<Walk> shortest_walks(const ReebGraph& SB, int from, int to) {
    std::vector<Walk> out;
    if (from == to) {
      Walk w;
      w.start = make_node_point(SB, from);
      w.end = make_node_point(SB, to);
      out.push_back(w);
      return out;
    }
    int n = int(SB.nodes.size());
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[from] = 0;
    q.push(from);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      auto relax = [&](int u) {
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          q.push(u);
        }
      };
      for (int e : SB.up_edges(v)) relax(SB.edges[e].upper);
      for (int e : SB.down_edges(v)) relax(SB.edges[e].lower);
    }
    if (dist[to] < 0) return out;
    std::vector<std::pair<int, int>> stack;
    std::function<void(int)> rec = [&](int v) {
      if (int(out.size()) >= 64) return;
      if (v == from) {
        Walk w;
        w.start = make_node_point(SB, from);
        w.end = make_node_point(SB, to);
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
          int ev = it->second;
          int a = it->first;
          int other = SB.edges[ev].lower == a ? SB.edges[ev].upper
                                              : SB.edges[ev].lower;
          w.steps.push_back({ev, SB.nodes[other].h, SB.nodes[a].h});
        }
        out.push_back(w);
        return;
      }
      std::vector<std::pair<int, int>> preds;
      for (int e : SB.up_edges(v))
        if (dist[SB.edges[e].upper] == dist[v] - 1)
          preds.push_back({e, SB.edges[e].upper});
      for (int e : SB.down_edges(v))
        if (dist[SB.edges[e].lower] == dist[v] - 1)
          preds.push_back({e, SB.edges[e].lower});
      std::sort(preds.begin(), preds.end());
      for (auto& [e, u] : preds) {
        stack.push_back({v, e});
        rec(u);
        stack.pop_back();
      }
    };
    rec(to);
    return out;
  }

  // junction crossings of a walk over a cell: (other-graph vertex, component
  // required for the other map there)
  struct Crossing {
    int jb;    // subdivided vertex of the walk's graph
    int comp;  // component of the partner in the window at jb's height
  };
  // on failure returns nullopt (a crossing with an undefined component)
  std::optional<std::vector<Crossing>> walk_crossings(int side, int cell,
                                                      const Walk& wk) {
    const ReebGraph& SA = side == 0 ? SF.graph : SG.graph;
    const ReebGraph& SB = side == 0 ? SG.graph : SF.graph;
    const ReebGraph& Aorig = side == 0 ? F : G;
    const Subdivision& SAsub = side == 0 ? SF : SG;
    int lo = SA.edges[cell].lower, up = SA.edges[cell].upper;
    Interval span(SA.nodes[lo].h, SA.nodes[up].h);
    std::vector<Crossing> out;
    int k = int(wk.steps.size());
    for (int i = 1; i < k; ++i) {
      const auto& prev = wk.steps[i - 1];
      const Rat& junction_h = wk.steps[i].from_h;
      int jb = -1;
      for (int cand : {SB.edges[prev.edge].lower, SB.edges[prev.edge].upper})
        if (SB.nodes[cand].h == junction_h) jb = cand;
      if (jb < 0) continue;
      Rat sparam = span.lo + (span.hi - span.lo) * Rat(i) / Rat(k);
      Point partner = SAsub.to_old(Aorig, make_edge_point(SA, cell, sparam));
      // the partner's component in the window around the junction height,
      // taken in the walk's own source graph
      const WindowTable& t = window(side == 0 ? 1 : 0, junction_h);
      int comp = comp_of_point(t, Aorig, partner);
      if (comp < 0) return std::nullopt;
      out.push_back({jb, comp});
    }
    return out;
  }

  bool check_vertex_pairs(int side, int vertex, int image) {
    const ReebGraph& SA = side == 0 ? SF.graph : SG.graph;
    Point img_pt = original_vertex(side == 0 ? 1 : 0, image);
    if (side == 0) {
      const WindowTable& t = window(0, SA.nodes[vertex].h);
      int ci = comp_of_point(t, G, img_pt);
      if (ci < 0) return false;
      for (int w = 0; w < int(SG.graph.nodes.size()); ++w) {
        if (psi_assign[w] != vertex) continue;
        if (t.comp_of_img[w] != ci) return false;
      }
      if (psi_assign[image] >= 0) {
        const WindowTable& tw = window(1, SG.graph.nodes[image].h);
        Point partner = original_vertex(0, vertex);
        int cp = comp_of_point(tw, F, partner);
        if (cp < 0 || tw.comp_of_img[psi_assign[image]] != cp) return false;
      }
    } else {
      const WindowTable& t = window(1, SA.nodes[vertex].h);
      int ci = comp_of_point(t, F, img_pt);
      if (ci < 0) return false;
      for (int w = 0; w < int(SF.graph.nodes.size()); ++w) {
        if (phi_assign[w] != vertex) continue;
        if (t.comp_of_img[w] != ci) return false;
      }
      if (phi_assign[image] >= 0) {
        const WindowTable& tw = window(0, SF.graph.nodes[image].h);
        Point partner = original_vertex(1, vertex);
        int cp = comp_of_point(tw, G, partner);
        if (cp < 0 || tw.comp_of_img[phi_assign[image]] != cp) return false;
      }
    }
    return true;
  }

  bool check_metric(int side, int vertex, int image) {
    Rat bound = delta + delta;
    int fi = side == 0 ? vertex : image;
    int gi = side == 0 ? image : vertex;
    for (int v = 0; v < int(SF.graph.nodes.size()); ++v) {
      if (phi_assign[v] < 0) continue;
      if ((dF[fi][v] - dG[gi][phi_assign[v]]).abs() > bound) return false;
    }
    for (int w = 0; w < int(SG.graph.nodes.size()); ++w) {
      if (psi_assign[w] < 0) continue;
      if ((dF[fi][psi_assign[w]] - dG[gi][w]).abs() > bound) return false;
    }
    return true;
  }

  // the requirement check when a vertex of `side` receives an image; the
  // recorded component lives in the window over this side's target graph
  bool check_requirement(int side, int vertex, int image) {
    const std::vector<int>& req = side == 0 ? req_for_phi : req_for_psi;
    if (req[vertex] < 0) return true;
    const ReebGraph& SA = side == 0 ? SF.graph : SG.graph;
    const WindowTable& t = window(side, SA.nodes[vertex].h);
    return t.comp_of_img[image] == req[vertex];
  }

  void build_maps(PLMap* phi, PLMap* psi) {
    auto build = [&](const ReebGraph& Aorig, const Subdivision& SA,
                     const ReebGraph& Borig, const Subdivision& SB,
                     const std::vector<int>& assign,
                     const std::vector<int>& walk_choice,
                     const std::vector<std::vector<Walk>>& walks) {
      PLMap m;
      m.vertex_image.resize(Aorig.nodes.size());
      for (int v = 0; v < int(Aorig.nodes.size()); ++v)
        m.vertex_image[v] =
            SB.to_old(Borig, make_node_point(SB.graph, assign[v]));
      m.routes.resize(Aorig.edges.size());
      for (int e = 0; e < int(SA.graph.edges.size()); ++e) {
        const Walk& wk = walks[e][walk_choice[e]];
        Interval span = SA.graph.edge_span(e);
        std::vector<RouteStep> steps;
        if (wk.steps.empty()) {
          RouteStep st;
          st.s0 = span.lo;
          st.s1 = span.hi;
          st.stay = true;
          st.at = SB.to_old(
              Borig, make_node_point(SB.graph, assign[SA.graph.edges[e].lower]));
          steps.push_back(st);
        } else {
          int k = int(wk.steps.size());
          for (int i = 0; i < k; ++i) {
            RouteStep st;
            st.s0 = span.lo + (span.hi - span.lo) * Rat(i) / Rat(k);
            st.s1 = span.lo + (span.hi - span.lo) * Rat(i + 1) / Rat(k);
            st.tedge = SB.edge_origin[wk.steps[i].edge];
            st.t0 = wk.steps[i].from_h;
            st.t1 = wk.steps[i].to_h;
            steps.push_back(st);
          }
        }
        for (auto& st : steps) m.routes[SA.edge_origin[e]].push_back(st);
      }
      for (auto& route : m.routes) {
        std::sort(route.begin(), route.end(),
                  [](const RouteStep& x, const RouteStep& y) { return x.s0 < y.s0; });
        std::vector<RouteStep> tidy;
        for (auto& st : route) {
          if (st.s0 == st.s1) continue;
          if (!tidy.empty() && tidy.back().stay && st.stay &&
              tidy.back().at == st.at) {
            tidy.back().s1 = st.s1;
            continue;
          }
          tidy.push_back(st);
        }
        route = tidy;
      }
      return m;
    };
    *phi = build(F, SF, G, SG, phi_assign, phi_walk, phi_walks);
    *psi = build(G, SG, F, SF, psi_assign, psi_walk, psi_walks);
  }

  template <class Accept>
  bool search(std::size_t idx, Accept&& accept) {
    if (idx == order.size()) return accept();
    const Var& var = order[idx];
    if (var.kind <= 1) {
      int side = var.kind;
      std::vector<int>& assign = side == 0 ? phi_assign : psi_assign;
      const std::vector<int>& dom =
          side == 0 ? phi_dom[var.index] : psi_dom[var.index];
      for (int image : dom) {
        if (++nodes > budget.max_nodes) {
          exhausted = true;
          return false;
        }
        assign[var.index] = image;
        bool ok = metric_mode
                      ? check_metric(side, var.index, image)
                      : (check_requirement(side, var.index, image) &&
                         check_vertex_pairs(side, var.index, image));
        if (ok && search(idx + 1, accept)) return true;
        assign[var.index] = -1;
        if (exhausted) return false;
      }
      return false;
    }
    // cell variable: choose a shortest walk; register crossing requirements
    int side = var.kind - 2;
    const ReebGraph& SA = side == 0 ? SF.graph : SG.graph;
    const ReebGraph& SB = side == 0 ? SG.graph : SF.graph;
    std::vector<int>& assign = side == 0 ? phi_assign : psi_assign;
    std::vector<int>& walk_choice = side == 0 ? phi_walk : psi_walk;
    std::vector<std::vector<Walk>>& walks = side == 0 ? phi_walks : psi_walks;
    std::vector<int>& req = side == 0 ? req_for_psi : req_for_phi;
    const std::vector<int>& other_assign = side == 0 ? psi_assign : phi_assign;
    int lo = SA.edges[var.index].lower, up = SA.edges[var.index].upper;
    walks[var.index] = shortest_walks(SB, assign[lo], assign[up]);
    for (int c = 0; c < int(walks[var.index].size()); ++c) {
      if (++nodes > budget.max_nodes) {
        exhausted = true;
        return false;
      }
      bool ok = true;
      std::vector<std::pair<int, int>> set_reqs;  // (jb, previous value)
      if (!metric_mode) {
        auto crossings = walk_crossings(side, var.index, walks[var.index][c]);
        if (!crossings) {
          ok = false;
        } else {
          for (const Crossing& cr : *crossings) {
            if (req[cr.jb] >= 0 && req[cr.jb] != cr.comp) {
              ok = false;
              break;
            }
            if (other_assign[cr.jb] >= 0) {
              const WindowTable& t =
                  window(side == 0 ? 1 : 0, SB.nodes[cr.jb].h);
              if (t.comp_of_img[other_assign[cr.jb]] != cr.comp) {
                ok = false;
                break;
              }
            }
            if (req[cr.jb] < 0) {
              set_reqs.push_back({cr.jb, req[cr.jb]});
              req[cr.jb] = cr.comp;
            }
          }
        }
      }
      if (ok) {
        walk_choice[var.index] = c;
        if (search(idx + 1, accept)) return true;
        walk_choice[var.index] = -1;
      }
      for (auto& [jb, prev] : set_reqs) req[jb] = prev;
      if (exhausted) return false;
    }
    return false;
  }
};

bool grid_aligned(const ReebGraph& F, const ReebGraph& G, const Rat& delta,
                  const std::vector<Rat>& grid) {
  (void)delta;
  std::set<Rat> gs(grid.begin(), grid.end());
  for (const Rat& c : critical_heights(F))
    if (!gs.count(c)) return false;
  for (const Rat& c : critical_heights(G))
    if (!gs.count(c)) return false;
  return true;
}

SearchVerdict map_pair_decision(const ReebGraph& F, const ReebGraph& G,
                                const Rat& delta, const std::vector<Rat>& grid,
                                const SearchBudget& budget, bool metric_mode) {
  if (!is_valid(F) || !is_valid(G))
    throw std::invalid_argument("decision requires valid graphs");
  SearchVerdict out;
  out.kind = SearchVerdict::FalseAtResolution;
  std::vector<Rat> g = sorted_unique(grid);
  PairSearch ps(F, G, delta, g, metric_mode, budget);

  bool found = ps.search(0, [&]() -> bool {
    PLMap phi, psi;
    ps.build_maps(&phi, &psi);
    if (metric_mode) {
      DistortionPair cand{delta, phi, psi};
      if (!verify_distortion(F, G, cand).accepted) return false;
      out.distortion = std::move(cand);
      return true;
    }
    ContortionPair cand{delta, phi, psi};
    if (!verify_contortion(F, G, cand).accepted) return false;
    out.contortion = std::move(cand);
    return true;
  });
  out.nodes_explored = ps.nodes;
  if (found) {
    out.kind = SearchVerdict::Found;
    return out;
  }
  if (ps.exhausted) {
    out.kind = SearchVerdict::Exhausted;
    return out;
  }
  out.kind = grid_aligned(F, G, delta, g) ? SearchVerdict::FalseComplete
                                          : SearchVerdict::FalseAtResolution;
  return out;
}

}  // namespace

SearchVerdict contortion_decision(const ReebGraph& F, const ReebGraph& G,
                                  const Rat& delta, const std::vector<Rat>& grid,
                                  const SearchBudget& budget) {
  return map_pair_decision(F, G, delta, grid, budget, false);
}

SearchVerdict distortion_decision(const ReebGraph& F, const ReebGraph& G,
                                  const Rat& delta, const std::vector<Rat>& grid,
                                  const SearchBudget& budget) {
  return map_pair_decision(F, G, delta, grid, budget, true);
}

// ---------------------------------------------------------------------------

namespace {

void chain_tighten(DistanceReport* r) {
  // lower bounds flow up the chain d_I <= d_FD <= d_FC <= d_U
  r->d_FD.lower = max(r->d_FD.lower, r->d_I.lower);
  r->d_FC.lower = max(r->d_FC.lower, r->d_FD.lower);
  r->d_U.lower = max(r->d_U.lower, r->d_FC.lower);
  // upper bounds flow down
  r->d_FC.upper = min(r->d_FC.upper, r->d_U.upper);
  r->d_FD.upper = min(r->d_FD.upper, r->d_FC.upper);
  r->d_I.upper = min(r->d_I.upper, r->d_FD.upper);
  auto check = [](const DistanceBracket& b, const char* name) {
    if (b.upper < b.lower)
      throw std::logic_error(std::string("bracket inverted for ") + name);
  };
  check(r->d_I, "d_I");
  check(r->d_FD, "d_FD");
  check(r->d_FC, "d_FC");
  check(r->d_U, "d_U");
}

}  // namespace

DistanceReport distance_report(const ReebGraph& F, const ReebGraph& G) {
  if (!is_valid(F) || !is_valid(G))
    throw std::invalid_argument("distance report requires valid graphs");
  DistanceReport r;

  if (is_merge_tree(F) && is_merge_tree(G)) {
    auto [dI, witness] = interleaving_distance_merge(F, G);
    ContortionPair cont = interleaving_to_contortion_merge(F, G, witness);
    DistortionPair dist = contortion_as_distortion(F, G, cont);
    Coupling coup = contortion_to_coupling_contour(F, G, cont);
    Verdict cv = verify_coupling(F, G, coup);
    if (!cv.accepted) throw std::logic_error("pipeline coupling failed");
    r.d_I = {dI, dI, "exhausted candidate decisions below",
             "interleaving certificate"};
    r.d_FD = {dI, dI, "chain from d_I", "contortion pair re-tagged (same delta)"};
    r.d_FC = {dI, dI, "chain from d_I", "contortion pair from the interleaving"};
    r.d_U = {dI, cv.measured, "chain from d_FC", "contour-tree coupling"};
    chain_tighten(&r);
    return r;
  }

  // general graphs: brackets from value bounds, bounded decisions, and
  // transformations of whatever verified certificates exist
  Rat dI_low = max((F.max_height() - G.max_height()).abs(),
                   (F.min_height() - G.min_height()).abs());
  Rat triv = max(F.max_height() - G.min_height(), G.max_height() - F.min_height());
  triv = max(triv, Rat(0));
  r.d_I = {dI_low, triv, "value range bound", "trivial full-window interleaving"};

  std::vector<Rat> cand = candidate_deltas(F, G);
  std::vector<Rat> grid;
  for (const Rat& c : critical_heights(F)) grid.push_back(c);
  for (const Rat& c : critical_heights(G)) grid.push_back(c);

  SearchBudget budget;
  budget.max_nodes = 500000;

  auto bracket_from_decisions =
      [&](bool metric, std::optional<ContortionPair>* found_cont,
          std::optional<DistortionPair>* found_dist) -> DistanceBracket {
    DistanceBracket b{Rat(0), triv, "zero", "trivial bound"};
    for (const Rat& d : cand) {
      std::vector<Rat> dgrid = grid;
      for (const Rat& c : grid) {
        dgrid.push_back(c + d);
        dgrid.push_back(c - d);
      }
      SearchVerdict v = metric ? distortion_decision(F, G, d, dgrid, budget)
                               : contortion_decision(F, G, d, dgrid, budget);
      if (v.kind == SearchVerdict::Found) {
        b.upper = d;
        b.upper_evidence = "decision witness at delta " + d.str();
        if (found_cont && v.contortion) *found_cont = v.contortion;
        if (found_dist && v.distortion) *found_dist = v.distortion;
        break;
      }
      if (v.kind == SearchVerdict::FalseComplete) {
        b.lower = d;
        b.lower_evidence = "no pair at delta " + d.str() + " (grid-complete)";
        // the next candidate is the honest closed lower bound
        auto it = std::upper_bound(cand.begin(), cand.end(), d);
        if (it != cand.end()) b.lower = *it;
      } else if (v.kind == SearchVerdict::Exhausted) {
        b.lower_evidence += " (search exhausted at delta " + d.str() + ")";
      } else if (v.kind == SearchVerdict::FalseAtResolution) {
        b.lower_evidence += " (false at resolution, delta " + d.str() + ")";
      }
    }
    return b;
  };

  std::optional<ContortionPair> cont;
  std::optional<DistortionPair> dist;
  r.d_FC = bracket_from_decisions(false, &cont, nullptr);
  r.d_FD = bracket_from_decisions(true, nullptr, &dist);

  // universal distance: uppers through the constructions
  r.d_U = {Rat(0), Rat(0), "chain from d_FC", ""};
  Rat best_upper = triv + triv + triv;  // 3x the trivial distortion bound
  std::string ev = "three times the trivial distortion bound";
  if (dist) {
    Coupling c3 = distortion_to_coupling(F, G, *dist);
    Verdict v3 = verify_coupling(F, G, c3);
    if (v3.accepted && v3.measured < best_upper) {
      best_upper = v3.measured;
      ev = "coupling from the distortion pair";
    }
  }
  if (cont && is_contour_tree(F) && is_contour_tree(G)) {
    Coupling c1 = contortion_to_coupling_contour(F, G, *cont);
    Verdict v1 = verify_coupling(F, G, c1);
    if (v1.accepted && v1.measured < best_upper) {
      best_upper = v1.measured;
      ev = "contour-tree coupling from the contortion pair";
    }
  }
  r.d_U.upper = best_upper;
  r.d_U.upper_evidence = ev;

  chain_tighten(&r);
  return r;
}

}  // namespace reeb
