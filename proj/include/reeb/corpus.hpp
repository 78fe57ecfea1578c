#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reeb/reeb_graph.hpp"

namespace reeb {

/// splitmix64: the named deterministic generator behind all corpus
/// randomness. No environment-dependent entropy anywhere.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0, n) by rejection
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }
};

enum class GraphKind { Reeb, Contour, Merge };

struct CorpusSpec {
  int count = 1;
  int node_budget = 8;
  GraphKind kind = GraphKind::Merge;
  std::uint64_t seed = 0;
  int height_denominator_bound = 4;
};

/// Deterministic per seed; every generated graph passes validate and the
/// requested kind predicate.
std::vector<ReebGraph> generate_corpus(const CorpusSpec& spec);
ReebGraph generate_graph(GraphKind kind, int node_budget,
                         int height_denominator_bound, SplitMix64& rng,
                         const std::string& name);

}  // namespace reeb
