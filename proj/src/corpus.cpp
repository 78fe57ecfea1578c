#include "reeb/corpus.hpp"

#include <stdexcept>

namespace reeb {

namespace {

Rat random_height(SplitMix64& rng, int den_bound, int range) {
  // heights in [-range, range] with denominator <= den_bound
  long den = long(rng.below(den_bound)) + 1;
  long num = long(rng.below(2 * range * den + 1)) - range * den;
  return Rat(num, den);
}

}  // namespace

ReebGraph generate_graph(GraphKind kind, int node_budget,
                         int height_denominator_bound, SplitMix64& rng,
                         const std::string& name) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    int n = 2 + int(rng.below(std::max(1, node_budget - 1)));
    ReebGraph g;
    g.name = name;
    for (int i = 0; i < n; ++i)
      g.nodes.push_back({"v" + std::to_string(i),
                         random_height(rng, height_denominator_bound, 4)});
    g.reindex();
    bool ok = true;
    if (kind == GraphKind::Merge) {
      // attach each node (by descending height) to a strictly higher node
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (g.nodes[a].h != g.nodes[b].h) return g.nodes[a].h > g.nodes[b].h;
        return a < b;
      });
      for (int i = 1; i < n; ++i) {
        std::vector<int> above;
        for (int j = 0; j < i; ++j)
          if (g.nodes[order[j]].h > g.nodes[order[i]].h) above.push_back(order[j]);
        if (above.empty()) {
          ok = false;
          break;
        }
        int up = above[rng.below(above.size())];
        g.edges.push_back({order[i], up});
      }
    } else {
      // spanning tree with height-monotone edges
      for (int i = 1; i < n; ++i) {
        std::vector<int> others;
        for (int j = 0; j < i; ++j)
          if (g.nodes[j].h != g.nodes[i].h) others.push_back(j);
        if (others.empty()) {
          ok = false;
          break;
        }
        int o = others[rng.below(others.size())];
        if (g.nodes[o].h < g.nodes[i].h)
          g.edges.push_back({o, i});
        else
          g.edges.push_back({i, o});
      }
      if (ok && kind == GraphKind::Reeb) {
        int extra = int(rng.below(3));
        for (int k = 0; k < extra; ++k) {
          int a = int(rng.below(n)), b = int(rng.below(n));
          if (g.nodes[a].h == g.nodes[b].h) continue;
          if (g.nodes[a].h > g.nodes[b].h) std::swap(a, b);
          g.edges.push_back({a, b});
        }
      }
    }
    if (!ok) continue;
    g.reindex();
    if (!is_valid(g)) continue;
    if (kind == GraphKind::Merge && !is_merge_tree(g)) continue;
    if (kind == GraphKind::Contour && !is_contour_tree(g)) continue;
    return g;
  }
  throw std::logic_error("corpus generation failed to produce a valid graph");
}

std::vector<ReebGraph> generate_corpus(const CorpusSpec& spec) {
  SplitMix64 rng(spec.seed);
  std::vector<ReebGraph> out;
  for (int i = 0; i < spec.count; ++i)
    out.push_back(generate_graph(spec.kind, spec.node_budget,
                                 spec.height_denominator_bound, rng,
                                 "corpus" + std::to_string(i)));
  return out;
}

}  // namespace reeb
