#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "embedshape/common/error.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"

namespace embedshape {
namespace {

double linf(const Bar& p, const Bar& q) {
  return std::max(std::abs(p.birth - q.birth), std::abs(p.death - q.death));
}

double half_persistence(const Bar& p) { return (p.death - p.birth) / 2.0; }

// Hopcroft-Karp maximum matching on a bipartite graph given as left
// adjacency lists.
class HopcroftKarp {
 public:
  HopcroftKarp(std::size_t left, std::size_t right)
      : adj_(left), match_left_(left), match_right_(right), dist_(left) {}

  void clear_edges() {
    for (auto& a : adj_) a.clear();
  }
  void add_edge(std::size_t u, std::size_t v) { adj_[u].push_back(static_cast<int>(v)); }

  std::size_t max_matching() {
    std::fill(match_left_.begin(), match_left_.end(), -1);
    std::fill(match_right_.begin(), match_right_.end(), -1);
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < adj_.size(); ++u)
        if (match_left_[u] == -1 && dfs(static_cast<int>(u))) ++matched;
    }
    return matched;
  }

 private:
  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      if (match_left_[u] == -1) {
        dist_[u] = 0;
        q.push(static_cast<int>(u));
      } else {
        dist_[u] = kInf;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        const int w = match_right_[v];
        if (w == -1) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      const int w = match_right_[v];
      if (w == -1 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  static constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_left_, match_right_, dist_;
};

}  // namespace

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.degree != b.degree)
    throw DegreeMismatchError("bottleneck distance between degree " + std::to_string(a.degree) +
                              " and degree " + std::to_string(b.degree) + " diagrams");
  const std::size_t na = a.size(), nb = b.size();
  if (na + nb == 0) return 0.0;

  std::vector<double> candidates{0.0};
  candidates.reserve(na * nb + na + nb + 1);
  for (const auto& p : a.bars) candidates.push_back(half_persistence(p));
  for (const auto& q : b.bars) candidates.push_back(half_persistence(q));
  for (const auto& p : a.bars)
    for (const auto& q : b.bars) candidates.push_back(linf(p, q));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Left: A points, then diagonal copies of B points.
  // Right: B points, then diagonal copies of A points.
  const std::size_t size = na + nb;
  HopcroftKarp graph(size, size);
  auto feasible = [&](double delta) {
    graph.clear_edges();
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j)
        if (linf(a.bars[i], b.bars[j]) <= delta) graph.add_edge(i, j);
      if (half_persistence(a.bars[i]) <= delta) graph.add_edge(i, nb + i);
    }
    for (std::size_t j = 0; j < nb; ++j) {
      if (half_persistence(b.bars[j]) <= delta) graph.add_edge(na + j, j);
      for (std::size_t i = 0; i < na; ++i) graph.add_edge(na + j, nb + i);
    }
    return graph.max_matching() == size;
  };

  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid])) hi = mid;
    else lo = mid + 1;
  }
  return candidates[lo];
}

}  // namespace embedshape
