#pragma once
// Exhaustive diagram matchings: every partial injection A -> B, with the
// unmatched points of both sides sent to the diagonal.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

using Point = std::pair<double, double>;

inline double linf(const Point& p, const Point& q) {
  return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
}
inline double l1_to_diagonal_linf(const Point& p) { return (p.second - p.first) / 2.0; }

// Calls visit(assign) for every partial injection; assign[i] is the B index
// for A[i] or -1 for the diagonal.
inline void for_each_partial_injection(std::size_t na, std::size_t nb,
                                       const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> assign(na, -1);
  std::vector<char> used(nb, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == na) {
      visit(assign);
      return;
    }
    assign[i] = -1;
    rec(i + 1);
    for (std::size_t j = 0; j < nb; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      assign[i] = static_cast<int>(j);
      rec(i + 1);
      used[j] = 0;
    }
    assign[i] = -1;
  };
  rec(0);
}

inline double brute_bottleneck(const std::vector<Point>& a, const std::vector<Point>& b) {
  double best = std::numeric_limits<double>::infinity();
  for_each_partial_injection(a.size(), b.size(), [&](const std::vector<int>& assign) {
    std::vector<char> hit(b.size(), 0);
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (assign[i] < 0) {
        cost = std::max(cost, l1_to_diagonal_linf(a[i]));
      } else {
        hit[static_cast<std::size_t>(assign[i])] = 1;
        cost = std::max(cost, linf(a[i], b[static_cast<std::size_t>(assign[i])]));
      }
    }
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!hit[j]) cost = std::max(cost, l1_to_diagonal_linf(b[j]));
    best = std::min(best, cost);
  });
  return best;
}

// Exact 1-Wasserstein distance with the Euclidean ground metric.
inline double brute_wasserstein1(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto l2 = [](const Point& p, const Point& q) { return std::hypot(p.first - q.first, p.second - q.second); };
  auto diag = [](const Point& p) { return (p.second - p.first) / std::sqrt(2.0); };
  double best = std::numeric_limits<double>::infinity();
  for_each_partial_injection(a.size(), b.size(), [&](const std::vector<int>& assign) {
    std::vector<char> hit(b.size(), 0);
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (assign[i] < 0) {
        cost += diag(a[i]);
      } else {
        hit[static_cast<std::size_t>(assign[i])] = 1;
        cost += l2(a[i], b[static_cast<std::size_t>(assign[i])]);
      }
    }
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!hit[j]) cost += diag(b[j]);
    best = std::min(best, cost);
  });
  return best;
}

}  // namespace oracle
