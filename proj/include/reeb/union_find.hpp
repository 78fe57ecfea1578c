#pragma once

#include <numeric>
#include <vector>

namespace reeb {

struct UnionFind {
  std::vector<int> parent, rnk;

  explicit UnionFind(int n) : parent(n), rnk(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  // returns true if the two sets were distinct
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rnk[a] < rnk[b]) std::swap(a, b);
    parent[b] = a;
    if (rnk[a] == rnk[b]) rnk[a]++;
    return true;
  }
};

}  // namespace reeb
