#include "reeb/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace reeb {

using nlohmann::ordered_json;

namespace {

ordered_json rat_json(const Rat& r) {
  auto [n, d] = r.to_int64_pair();
  return ordered_json::array({n, d});
}

Rat rat_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("height must be [num, den]");
  return Rat::from_strings(j[0].dump(), j[1].dump());
}

// serialization order: nodes by (height, id); edges by endpoint positions
std::vector<int> serial_order(const ReebGraph& g) {
  std::vector<int> order(g.nodes.size());
  for (int i = 0; i < int(order.size()); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.nodes[a].h != g.nodes[b].h) return g.nodes[a].h < g.nodes[b].h;
    return g.nodes[a].id < g.nodes[b].id;
  });
  return order;
}

ordered_json point_json(const ReebGraph& g, const Point& p) {
  ordered_json j;
  if (p.is_node()) {
    j["node"] = g.nodes[p.node].id;
  } else {
    j["edge"] = p.edge;
    j["h"] = rat_json(p.h);
  }
  return j;
}

Point point_from(const ReebGraph& g, const ordered_json& j) {
  if (j.contains("node")) return make_point_by_id(g, j["node"].get<std::string>());
  return make_edge_point(g, j["edge"].get<int>(), rat_from(j["h"]));
}

ordered_json key_json(const ReebGraph& g, const ComponentKey& k) {
  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (int n : k.nodes) j["nodes"].push_back(g.nodes[n].id);
  j["edges"] = k.edges;
  return j;
}

ComponentKey key_from(const ReebGraph& g, const ordered_json& j) {
  ComponentKey k;
  for (const auto& id : j["nodes"]) {
    int n = g.node_index(id.get<std::string>());
    if (n < 0) throw std::invalid_argument("unknown node in component key");
    k.nodes.push_back(n);
  }
  for (const auto& e : j["edges"]) k.edges.push_back(e.get<int>());
  std::sort(k.nodes.begin(), k.nodes.end());
  std::sort(k.edges.begin(), k.edges.end());
  return k;
}

ordered_json plmap_json(const ReebGraph& src, const ReebGraph& dst,
                        const PLMap& m) {
  ordered_json j;
  j["vertex_images"] = ordered_json::array();
  for (int v = 0; v < int(src.nodes.size()); ++v) {
    ordered_json e;
    e["v"] = src.nodes[v].id;
    e["to"] = point_json(dst, m.vertex_image[v]);
    j["vertex_images"].push_back(e);
  }
  j["routes"] = ordered_json::array();
  for (int e = 0; e < int(src.edges.size()); ++e) {
    ordered_json r;
    r["edge"] = e;
    r["steps"] = ordered_json::array();
    for (const auto& st : m.routes[e]) {
      ordered_json s;
      s["s"] = ordered_json::array({rat_json(st.s0), rat_json(st.s1)});
      if (st.stay) {
        s["at"] = point_json(dst, st.at);
      } else {
        s["edge"] = st.tedge;
        s["t"] = ordered_json::array({rat_json(st.t0), rat_json(st.t1)});
      }
      r["steps"].push_back(s);
    }
    j["routes"].push_back(r);
  }
  return j;
}

PLMap plmap_from(const ReebGraph& src, const ReebGraph& dst,
                 const ordered_json& j) {
  PLMap m;
  m.vertex_image.resize(src.nodes.size());
  for (const auto& e : j.at("vertex_images")) {
    int v = src.node_index(e.at("v").get<std::string>());
    if (v < 0) throw std::invalid_argument("unknown source node in map");
    m.vertex_image[v] = point_from(dst, e.at("to"));
  }
  m.routes.resize(src.edges.size());
  for (const auto& r : j.at("routes")) {
    int e = r.at("edge").get<int>();
    for (const auto& s : r.at("steps")) {
      RouteStep st;
      st.s0 = rat_from(s.at("s")[0]);
      st.s1 = rat_from(s.at("s")[1]);
      if (s.contains("at")) {
        st.stay = true;
        st.at = point_from(dst, s.at("at"));
      } else {
        st.tedge = s.at("edge").get<int>();
        st.t0 = rat_from(s.at("t")[0]);
        st.t1 = rat_from(s.at("t")[1]);
      }
      m.routes[e].push_back(st);
    }
  }
  return m;
}

ordered_json parse_text(const std::string& text) {
  return ordered_json::parse(text);  // nlohmann reports byte positions
}

}  // namespace

std::string serialize_graph(const ReebGraph& g) {
  std::vector<int> order = serial_order(g);
  std::vector<int> pos(g.nodes.size());
  for (int i = 0; i < int(order.size()); ++i) pos[order[i]] = i;
  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (int v : order) {
    ordered_json n;
    n["id"] = g.nodes[v].id;
    n["h"] = rat_json(g.nodes[v].h);
    j["nodes"].push_back(n);
  }
  std::vector<std::pair<int, int>> es;
  for (const auto& e : g.edges) es.push_back({pos[e.lower], pos[e.upper]});
  std::sort(es.begin(), es.end());
  j["edges"] = ordered_json::array();
  for (auto& [a, b] : es)
    j["edges"].push_back(ordered_json::array(
        {g.nodes[order[a]].id, g.nodes[order[b]].id}));
  return j.dump(1) + "\n";
}

ReebGraph parse_graph(const std::string& text) {
  ordered_json j = parse_text(text);
  ReebGraph g;
  for (const auto& n : j.at("nodes"))
    g.nodes.push_back({n.at("id").get<std::string>(), rat_from(n.at("h"))});
  g.reindex();
  for (const auto& e : j.at("edges")) {
    int a = g.node_index(e[0].get<std::string>());
    int b = g.node_index(e[1].get<std::string>());
    if (a < 0 || b < 0) throw std::invalid_argument("edge references missing node");
    g.edges.push_back({a, b});
  }
  g.reindex();
  return g;
}

std::string serialize_complex(const Complex2& x) {
  std::vector<int> order(x.vertices.size());
  for (int i = 0; i < int(order.size()); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x.vertices[a].h != x.vertices[b].h) return x.vertices[a].h < x.vertices[b].h;
    return x.vertices[a].id < x.vertices[b].id;
  });
  std::vector<int> pos(x.vertices.size());
  for (int i = 0; i < int(order.size()); ++i) pos[order[i]] = i;
  ordered_json j;
  j["vertices"] = ordered_json::array();
  for (int v : order) {
    ordered_json n;
    n["id"] = x.vertices[v].id;
    n["h"] = rat_json(x.vertices[v].h);
    j["vertices"].push_back(n);
  }
  std::vector<std::array<int, 2>> es;
  for (const auto& e : x.edges) {
    std::array<int, 2> p{pos[e[0]], pos[e[1]]};
    std::sort(p.begin(), p.end());
    es.push_back(p);
  }
  std::sort(es.begin(), es.end());
  j["edges"] = ordered_json::array();
  for (auto& e : es)
    j["edges"].push_back(ordered_json::array(
        {x.vertices[order[e[0]]].id, x.vertices[order[e[1]]].id}));
  std::vector<std::array<int, 3>> ts;
  for (const auto& t : x.triangles) {
    std::array<int, 3> p{pos[t[0]], pos[t[1]], pos[t[2]]};
    std::sort(p.begin(), p.end());
    ts.push_back(p);
  }
  std::sort(ts.begin(), ts.end());
  j["triangles"] = ordered_json::array();
  for (auto& t : ts)
    j["triangles"].push_back(ordered_json::array({x.vertices[order[t[0]]].id,
                                                  x.vertices[order[t[1]]].id,
                                                  x.vertices[order[t[2]]].id}));
  return j.dump(1) + "\n";
}

Complex2 parse_complex(const std::string& text) {
  ordered_json j = parse_text(text);
  Complex2 x;
  x.reindex();
  for (const auto& n : j.at("vertices"))
    x.add_vertex(n.at("id").get<std::string>(), rat_from(n.at("h")));
  for (const auto& e : j.at("edges")) {
    int a = x.vertex_index(e[0].get<std::string>());
    int b = x.vertex_index(e[1].get<std::string>());
    if (a < 0 || b < 0)
      throw std::invalid_argument("edge references missing vertex");
    x.add_edge(a, b);
  }
  if (j.contains("triangles"))
    for (const auto& t : j.at("triangles")) {
      int a = x.vertex_index(t[0].get<std::string>());
      int b = x.vertex_index(t[1].get<std::string>());
      int c = x.vertex_index(t[2].get<std::string>());
      if (a < 0 || b < 0 || c < 0)
        throw std::invalid_argument("triangle references missing vertex");
      x.add_triangle(a, b, c);
    }
  return x;
}

namespace {

std::string dump_pair(const ReebGraph& F, const ReebGraph& G, const Rat& delta,
                      const PLMap& phi, const PLMap& psi, const char* kind) {
  ordered_json j;
  j["kind"] = kind;
  j["delta"] = rat_json(delta);
  j["phi"] = plmap_json(F, G, phi);
  j["psi"] = plmap_json(G, F, psi);
  return j.dump(1) + "\n";
}

}  // namespace

std::string serialize_distortion(const ReebGraph& F, const ReebGraph& G,
                                 const DistortionPair& p) {
  return dump_pair(F, G, p.delta, p.phi, p.psi, "distortion");
}
std::string serialize_contortion(const ReebGraph& F, const ReebGraph& G,
                                 const ContortionPair& p) {
  return dump_pair(F, G, p.delta, p.phi, p.psi, "contortion");
}

std::string serialize_interleaving(const ReebGraph& F, const ReebGraph& G,
                                   const InterleavingPair& p) {
  ordered_json j;
  j["kind"] = "interleaving";
  j["delta"] = rat_json(p.delta);
  j["grid"] = ordered_json::array();
  for (const Rat& t : p.grid) j["grid"].push_back(rat_json(t));
  auto side = [&](const ReebGraph& A, const ReebGraph& B,
                  const std::vector<InterleavingPair::Assignment>& as) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : as) {
      ordered_json e;
      e["at"] = point_json(A, a.at);
      e["members"] = key_json(B, a.component);
      arr.push_back(e);
    }
    return arr;
  };
  j["phi_components"] = side(F, G, p.phi);
  j["psi_components"] = side(G, F, p.psi);
  return j.dump(1) + "\n";
}

std::string serialize_coupling(const Coupling& c) {
  ordered_json j;
  j["kind"] = "coupling";
  j["delta"] = rat_json(c.delta);
  j["complex"] = parse_text(serialize_complex(c.z));
  // height tables follow the complex's serialized vertex order
  ordered_json fh = ordered_json::array(), gh = ordered_json::array();
  for (const auto& v : j["complex"]["vertices"]) {
    int i = c.z.vertex_index(v["id"].get<std::string>());
    fh.push_back(rat_json(c.f_hat[i]));
    gh.push_back(rat_json(c.g_hat[i]));
  }
  j["f_hat"] = fh;
  j["g_hat"] = gh;
  auto iso = [&](const std::vector<std::pair<std::string, std::string>>& m) {
    ordered_json arr = ordered_json::array();
    for (auto& [a, b] : m) arr.push_back(ordered_json::array({a, b}));
    return arr;
  };
  j["iso_f"] = iso(c.iso_f);
  j["iso_g"] = iso(c.iso_g);
  return j.dump(1) + "\n";
}

std::string certificate_kind(const std::string& text) {
  return parse_text(text).at("kind").get<std::string>();
}

DistortionPair parse_distortion(const ReebGraph& F, const ReebGraph& G,
                                const std::string& text) {
  ordered_json j = parse_text(text);
  if (j.at("kind") != "distortion")
    throw std::invalid_argument("certificate kind mismatch");
  return {rat_from(j.at("delta")), plmap_from(F, G, j.at("phi")),
          plmap_from(G, F, j.at("psi"))};
}

ContortionPair parse_contortion(const ReebGraph& F, const ReebGraph& G,
                                const std::string& text) {
  ordered_json j = parse_text(text);
  if (j.at("kind") != "contortion")
    throw std::invalid_argument("certificate kind mismatch");
  return {rat_from(j.at("delta")), plmap_from(F, G, j.at("phi")),
          plmap_from(G, F, j.at("psi"))};
}

InterleavingPair parse_interleaving(const ReebGraph& F, const ReebGraph& G,
                                    const std::string& text) {
  ordered_json j = parse_text(text);
  if (j.at("kind") != "interleaving")
    throw std::invalid_argument("certificate kind mismatch");
  InterleavingPair p;
  p.delta = rat_from(j.at("delta"));
  for (const auto& t : j.at("grid")) p.grid.push_back(rat_from(t));
  for (const auto& e : j.at("phi_components"))
    p.phi.push_back({point_from(F, e.at("at")), key_from(G, e.at("members"))});
  for (const auto& e : j.at("psi_components"))
    p.psi.push_back({point_from(G, e.at("at")), key_from(F, e.at("members"))});
  return p;
}

Coupling parse_coupling(const std::string& text) {
  ordered_json j = parse_text(text);
  if (j.at("kind") != "coupling")
    throw std::invalid_argument("certificate kind mismatch");
  Coupling c;
  c.delta = rat_from(j.at("delta"));
  c.z = parse_complex(j.at("complex").dump());
  c.f_hat.resize(c.z.vertices.size());
  c.g_hat.resize(c.z.vertices.size());
  int i = 0;
  for (const auto& v : j.at("complex").at("vertices")) {
    int vi = c.z.vertex_index(v.at("id").get<std::string>());
    c.f_hat[vi] = rat_from(j.at("f_hat")[i]);
    c.g_hat[vi] = rat_from(j.at("g_hat")[i]);
    ++i;
  }
  for (const auto& e : j.at("iso_f"))
    c.iso_f.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
  for (const auto& e : j.at("iso_g"))
    c.iso_g.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
  return c;
}

std::string serialize_point_map(
    const ReebGraph& src, const ReebGraph& dst,
    const std::vector<std::pair<Point, Point>>& pairs) {
  ordered_json j;
  j["points"] = ordered_json::array();
  for (const auto& [a, b] : pairs)
    j["points"].push_back(
        ordered_json::array({point_json(src, a), point_json(dst, b)}));
  return j.dump(1) + "\n";
}

namespace {
ordered_json bracket_json(const DistanceBracket& b) {
  ordered_json j;
  j["lower"] = rat_json(b.lower);
  j["upper"] = rat_json(b.upper);
  j["lower_evidence"] = b.lower_evidence;
  j["upper_evidence"] = b.upper_evidence;
  return j;
}
}  // namespace

std::string serialize_report(const DistanceReport& r) {
  ordered_json j;
  j["d_I"] = bracket_json(r.d_I);
  j["d_FD"] = bracket_json(r.d_FD);
  j["d_FC"] = bracket_json(r.d_FC);
  j["d_U"] = bracket_json(r.d_U);
  return j.dump(1) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << content;
}

}  // namespace reeb
