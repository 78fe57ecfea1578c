#include "reeb/certificates.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "reeb/smoothing.hpp"

namespace reeb {

namespace {

void require_wellformed(const ReebGraph& src, const ReebGraph& dst,
                        const PLMap& m, const std::string& which) {
  auto v = validate_plmap(src, dst, m);
  if (!v.empty())
    throw std::invalid_argument("malformed PLMap (" + which + "): " +
                                v.front().message);
}

std::vector<Rat> midpointed(std::vector<Rat> hs) {
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  std::vector<Rat> out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    out.push_back(hs[i]);
    if (i + 1 < hs.size()) out.push_back(mid(hs[i], hs[i + 1]));
  }
  return out;
}

// cached interlevel partitions per window
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

}  // namespace

std::vector<Rat> edge_event_heights(const ReebGraph& src, const ReebGraph& dst,
                                    const PLMap& m, int src_edge,
                                    const std::vector<Rat>& shifts) {
  Interval span = src.edge_span(src_edge);
  std::vector<Rat> hs = route_breakpoints(m, src_edge);
  std::vector<Rat> crit = critical_heights(src);
  std::vector<Rat> critd = critical_heights(dst);
  crit.insert(crit.end(), critd.begin(), critd.end());
  for (const Rat& c : crit)
    for (const Rat& s : shifts) {
      Rat v = c + s;
      if (span.contains(v)) hs.push_back(v);
    }
  hs.push_back(span.lo);
  hs.push_back(span.hi);
  return midpointed(std::move(hs));
}

namespace {

// correspondence samples (x, phi(x)) at the event set of the design
// decision: route breakpoints, shifted-critical preimages, midpoints
std::vector<std::pair<Point, Point>> correspondence_samples(
    const ReebGraph& src, const ReebGraph& dst, const PLMap& m,
    const std::vector<Rat>& extra_heights, const std::vector<Rat>& shifts) {
  std::vector<std::pair<Point, Point>> out;
  for (int v = 0; v < int(src.nodes.size()); ++v) {
    Point p = make_node_point(src, v);
    out.push_back({p, m.vertex_image[v]});
  }
  std::vector<Rat> crit = critical_heights(src);
  std::vector<Rat> critd = critical_heights(dst);
  crit.insert(crit.end(), critd.begin(), critd.end());
  for (int e = 0; e < int(src.edges.size()); ++e) {
    Interval span = src.edge_span(e);
    std::vector<Rat> hs = route_breakpoints(m, e);
    for (const Rat& c : crit)
      for (const Rat& s : shifts) {
        Rat v = c + s;
        if (span.contains(v)) hs.push_back(v);
      }
    for (const Rat& x : extra_heights)
      if (span.contains(x)) hs.push_back(x);
    for (const Rat& h : midpointed(std::move(hs))) {
      Point p = make_edge_point(src, e, h);
      if (p.is_node()) continue;  // nodes already sampled
      out.push_back({p, plmap_eval(src, dst, m, p)});
    }
  }
  return out;
}

struct SiteIndex {
  std::vector<Point> sites;
  int intern(const ReebGraph& g, const Point& p) {
    for (int i = 0; i < int(sites.size()); ++i)
      if (sites[i] == p) return i;
    sites.push_back(p);
    return int(sites.size()) - 1;
  }
};

}  // namespace

Verdict verify_distortion(const ReebGraph& F, const ReebGraph& G,
                          const DistortionPair& pair) {
  require_wellformed(F, G, pair.phi, "phi");
  require_wellformed(G, F, pair.psi, "psi");
  const Rat& d = pair.delta;
  if (d < Rat(0)) return Verdict::reject("negative delta");

  // sup-norm conditions, exact at route piece endpoints
  auto value_ok = [&](const ReebGraph& src, const ReebGraph& dst, const PLMap& m,
                      std::string* why) {
    for (int v = 0; v < int(src.nodes.size()); ++v) {
      Rat err = (src.nodes[v].h - point_height(dst, m.vertex_image[v])).abs();
      if (err > d) {
        *why = "value error " + err.str() + " at node " + src.nodes[v].id;
        return false;
      }
    }
    for (int e = 0; e < int(src.edges.size()); ++e)
      for (const auto& st : m.routes[e]) {
        Rat e0 = (st.s0 - point_height(dst, st.start(dst))).abs();
        Rat e1 = (st.s1 - point_height(dst, st.end(dst))).abs();
        if (e0 > d || e1 > d) {
          *why = "value error on edge#" + std::to_string(e) + " route";
          return false;
        }
      }
    return true;
  };
  std::string why;
  if (!value_ok(F, G, pair.phi, &why)) return Verdict::reject(why);
  if (!value_ok(G, F, pair.psi, &why)) return Verdict::reject(why);

  // metric condition over the correspondence at event points
  std::vector<Rat> shifts{-(d + d), -d, d, d + d};
  std::vector<Rat> none;
  auto cf = correspondence_samples(F, G, pair.phi, none, shifts);
  auto cg = correspondence_samples(G, F, pair.psi, none, shifts);

  SiteIndex sf, sg;
  std::vector<std::pair<int, int>> corr;  // (site in F, site in G)
  for (auto& [x, y] : cf) corr.push_back({sf.intern(F, x), sg.intern(G, y)});
  for (auto& [y, x] : cg) corr.push_back({sf.intern(F, x), sg.intern(G, y)});

  auto dF = site_distance_matrix(F, sf.sites);
  auto dG = site_distance_matrix(G, sg.sites);

  Rat bound = d + d;
  for (std::size_t i = 0; i < corr.size(); ++i)
    for (std::size_t j = i + 1; j < corr.size(); ++j) {
      const Rat& a = dF[corr[i].first][corr[j].first];
      const Rat& b = dG[corr[i].second][corr[j].second];
      if ((a - b).abs() > bound) {
        return Verdict::reject(
            "metric distortion " + (a - b).abs().str() + " > 2*delta between (" +
            point_str(F, sf.sites[corr[i].first]) + ", " +
            point_str(G, sg.sites[corr[i].second]) + ") and (" +
            point_str(F, sf.sites[corr[j].first]) + ", " +
            point_str(G, sg.sites[corr[j].second]) + ")");
      }
    }
  return Verdict::accept();
}

Verdict verify_contortion(const ReebGraph& F, const ReebGraph& G,
                          const ContortionPair& pair) {
  require_wellformed(F, G, pair.phi, "phi");
  require_wellformed(G, F, pair.psi, "psi");
  const Rat& d = pair.delta;
  if (d < Rat(0)) return Verdict::reject("negative delta");

  PartitionCache pcF(F), pcG(G);

  // one direction: for event x in src, partners y in psi^-1(x) subset of dst
  // must be connected to phi(x) in dst^-1(I_delta(src(x)))
  auto side = [&](const ReebGraph& src, const ReebGraph& dst, const PLMap& phi,
                  const PLMap& psi, PartitionCache& pc,
                  std::string* why) -> bool {
    std::vector<Rat> shifts{-d, d};
    std::vector<Rat> extra = image_breakpoint_heights(src, psi);
    std::vector<Point> events;
    for (int v = 0; v < int(src.nodes.size()); ++v)
      events.push_back(make_node_point(src, v));
    std::vector<Rat> crit = critical_heights(src);
    std::vector<Rat> critd = critical_heights(dst);
    crit.insert(crit.end(), critd.begin(), critd.end());
    for (int e = 0; e < int(src.edges.size()); ++e) {
      Interval span = src.edge_span(e);
      std::vector<Rat> hs = route_breakpoints(phi, e);
      for (const Rat& c : crit)
        for (const Rat& s : shifts) {
          Rat v = c + s;
          if (span.contains(v)) hs.push_back(v);
        }
      for (const Rat& x : extra)
        if (span.contains(x)) hs.push_back(x);
      for (const Rat& h : midpointed(std::move(hs))) {
        Point p = make_edge_point(src, e, h);
        if (!p.is_node()) events.push_back(p);
      }
    }
    for (const Point& x : events) {
      Point phix = plmap_eval(src, dst, phi, x);
      Interval window = Interval::around(point_height(src, x), d);
      const InterlevelPartition& part = pc.at(window);
      int cphi = part.component_of(dst, phix);
      Preimage pre = plmap_preimage(dst, src, psi, x);
      if (cphi < 0 && (!pre.points.empty() || !pre.fragments.empty())) {
        *why = "phi(" + point_str(src, x) + ") outside window " + window.str();
        return false;
      }
      for (const Point& y : pre.points) {
        if (part.component_of(dst, y) != cphi) {
          *why = "partner " + point_str(dst, y) + " not connected to phi(" +
                 point_str(src, x) + ") in " + window.str();
          return false;
        }
      }
      for (const auto& fr : pre.fragments) {
        if (!(window.lo <= fr.lo && fr.hi <= window.hi)) {
          *why = "partner fragment on edge#" + std::to_string(fr.edge) +
                 " exits window " + window.str();
          return false;
        }
        if (part.edge_comp[fr.edge] != cphi) {
          *why = "partner fragment on edge#" + std::to_string(fr.edge) +
                 " not connected to phi(" + point_str(src, x) + ") in " +
                 window.str();
          return false;
        }
      }
    }
    return true;
  };

  std::string why;
  if (!side(F, G, pair.phi, pair.psi, pcG, &why)) return Verdict::reject(why);
  if (!side(G, F, pair.psi, pair.phi, pcF, &why)) return Verdict::reject(why);
  return Verdict::accept();
}

namespace {

// assignment lookup keyed by normalized points
const ComponentKey* find_assignment(const ReebGraph& g,
                                    const std::vector<InterleavingPair::Assignment>& as,
                                    const Point& p) {
  for (const auto& a : as)
    if (a.at == p) return &a.component;
  return nullptr;
}

}  // namespace

Verdict verify_interleaving(const ReebGraph& F, const ReebGraph& G,
                            const InterleavingPair& pair) {
  const Rat& d = pair.delta;
  if (d < Rat(0)) return Verdict::reject("negative delta");
  std::vector<Rat> grid = pair.grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // the grid must contain every shifted critical height that lands in range
  Rat lo_hull = min(F.min_height(), G.min_height());
  Rat hi_hull = max(F.max_height(), G.max_height());
  std::vector<Rat> crit = critical_heights(F);
  for (const Rat& c : critical_heights(G)) crit.push_back(c);
  for (const Rat& c : crit)
    for (const Rat& s : std::vector<Rat>{-(d + d), -d, Rat(0), d, d + d}) {
      Rat v = c + s;
      if (v < lo_hull || v > hi_hull) continue;
      if (!std::binary_search(grid.begin(), grid.end(), v))
        throw std::invalid_argument("grid must contain shifted critical heights");
    }

  Subdivision SF = subdivide(F, grid);
  Subdivision SG = subdivide(G, grid);
  PartitionCache pcF(F), pcG(G);
  SmoothedGraph smF = smooth(F, d), smG = smooth(G, d);

  auto side = [&](const ReebGraph& A, const Subdivision& SA, const ReebGraph& B,
                  const Subdivision& SB,
                  const std::vector<InterleavingPair::Assignment>& phi,
                  const std::vector<InterleavingPair::Assignment>& psi,
                  PartitionCache& pcA, PartitionCache& pcB,
                  const SmoothedGraph& smB, std::string* why) -> bool {
    // vertex assignments exist and name actual window components
    std::vector<const ComponentKey*> comp_of_vertex(SA.graph.nodes.size());
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point orig = SA.to_old(A, make_node_point(SA.graph, v));
      const ComponentKey* key = find_assignment(A, phi, orig);
      if (!key) {
        *why = "missing assignment at " + point_str(A, orig);
        return false;
      }
      Interval w = Interval::around(point_height(A, orig), d);
      const InterlevelPartition& part = pcB.at(w);
      bool found = false;
      for (const auto& k : part.components)
        if (k == *key) found = true;
      if (!found) {
        *why = "assignment at " + point_str(A, orig) +
               " is not a component of the window " + w.str();
        return false;
      }
      comp_of_vertex[v] = key;
    }
    // continuity: a monotone path joins consecutive assignments in the
    // smoothing of B
    for (int e = 0; e < int(SA.graph.edges.size()); ++e) {
      int a = SA.graph.edges[e].lower, b = SA.graph.edges[e].upper;
      Point pa = smB.point_for(SA.graph.nodes[a].h, *comp_of_vertex[a]);
      Point pb = smB.point_for(SA.graph.nodes[b].h, *comp_of_vertex[b]);
      if (!smB.monotone_path_exists(pa, pb)) {
        *why = "no monotone path between assigned components over cell " +
               SA.graph.nodes[a].id + "-" + SA.graph.nodes[b].id;
        return false;
      }
    }
    // round trips at grid vertices
    for (int v = 0; v < int(SA.graph.nodes.size()); ++v) {
      Point x = SA.to_old(A, make_node_point(SA.graph, v));
      const Rat& fx = point_height(A, x);
      const ComponentKey& phix = *comp_of_vertex[v];
      Interval big = Interval::around(fx, d + d);
      const InterlevelPartition& part = pcA.at(big);
      int cx = part.component_of(A, x);
      for (int w = 0; w < int(SB.graph.nodes.size()); ++w) {
        Point y = SB.to_old(B, make_node_point(SB.graph, w));
        const Rat& gy = point_height(B, y);
        if ((gy - fx).abs() > d) continue;
        bool inside = y.is_node() ? phix.contains_node(y.node)
                                  : phix.contains_edge(y.edge);
        if (!inside) continue;
        const ComponentKey* psiy = find_assignment(B, psi, y);
        if (!psiy) {
          *why = "missing assignment at " + point_str(B, y);
          return false;
        }
        for (int n : psiy->nodes)
          if (part.node_comp[n] != cx) {
            *why = "round trip leaves the 2-delta window of " + point_str(A, x);
            return false;
          }
        for (int ed : psiy->edges)
          if (part.edge_comp[ed] != cx) {
            *why = "round trip leaves the 2-delta window of " + point_str(A, x);
            return false;
          }
      }
    }
    return true;
  };

  std::string why;
  if (!side(F, SF, G, SG, pair.phi, pair.psi, pcF, pcG, smG, &why))
    return Verdict::reject(why);
  if (!side(G, SG, F, SF, pair.psi, pair.phi, pcG, pcF, smF, &why))
    return Verdict::reject(why);
  return Verdict::accept();
}

Verdict verify_coupling(const ReebGraph& F, const ReebGraph& G,
                        const Coupling& c) {
  auto viol = validate_complex(c.z);
  if (!viol.empty())
    throw std::invalid_argument("invalid coupling complex: " +
                                viol.front().message);
  if (c.f_hat.size() != c.z.vertices.size() ||
      c.g_hat.size() != c.z.vertices.size())
    throw std::invalid_argument("coupling height table size mismatch");

  auto check_side = [&](const std::vector<Rat>& heights, const ReebGraph& target,
                        const std::vector<std::pair<std::string, std::string>>& iso,
                        std::string* why) -> bool {
    ReebOfResult r = reeb_of(c.z, heights);
    if (r.graph.nodes.size() != target.nodes.size() ||
        r.graph.edges.size() != target.edges.size()) {
      *why = "quotient shape differs from target";
      return false;
    }
    std::map<std::string, std::string> fwd;
    std::set<std::string> used;
    for (auto& [a, b] : iso) {
      if (fwd.count(a) || used.count(b)) {
        *why = "claimed isomorphism is not a bijection";
        return false;
      }
      fwd[a] = b;
      used.insert(b);
    }
    if (int(fwd.size()) != int(target.nodes.size())) {
      *why = "claimed isomorphism misses nodes";
      return false;
    }
    for (const auto& n : r.graph.nodes) {
      auto it = fwd.find(n.id);
      int t = it == fwd.end() ? -1 : target.node_index(it->second);
      if (t < 0 || !(target.nodes[t].h == n.h)) {
        *why = "claimed isomorphism not height-preserving at " + n.id;
        return false;
      }
    }
    std::multiset<std::pair<std::string, std::string>> re, te;
    for (const auto& e : r.graph.edges)
      re.insert({fwd[r.graph.nodes[e.lower].id], fwd[r.graph.nodes[e.upper].id]});
    for (const auto& e : target.edges)
      te.insert({target.nodes[e.lower].id, target.nodes[e.upper].id});
    if (re != te) {
      *why = "claimed isomorphism does not match edges";
      return false;
    }
    return true;
  };

  std::string why;
  if (!check_side(c.f_hat, F, c.iso_f, &why))
    return Verdict::reject("f side: " + why);
  if (!check_side(c.g_hat, G, c.iso_g, &why))
    return Verdict::reject("g side: " + why);

  Rat sup(0);
  for (std::size_t v = 0; v < c.z.vertices.size(); ++v)
    sup = max(sup, (c.f_hat[v] - c.g_hat[v]).abs());
  Verdict verdict = Verdict::accept();
  verdict.measured = sup;
  if (sup > c.delta) {
    verdict = Verdict::reject("sup-norm " + sup.str() + " exceeds claimed " +
                              c.delta.str());
    verdict.measured = sup;
  }
  return verdict;
}

}  // namespace reeb
