#include <algorithm>
#include <cmath>
#include <numeric>

#include "embedshape/common/error.hpp"
#include "embedshape/significance/significance.hpp"

namespace embedshape {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t m = values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(m);
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j + 1 < m && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_matrix_correlation(const DistanceMatrix& e, const DistanceMatrix& d) {
  if (e.labels() != d.labels())
    throw LabelMismatchError("matrices must share labels in the same order");
  const std::size_t n = e.size();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      x.push_back(e(i, j));
      y.push_back(d(i, j));
    }
  auto rx = average_ranks(x), ry = average_ranks(y);
  const double centre = (static_cast<double>(x.size()) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    const double a = rx[k] - centre, b = ry[k] - centre;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateCorrelationError("rank vector is constant; correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace embedshape
