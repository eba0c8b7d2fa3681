#pragma once
// Spearman correlation from scratch and exhaustive search over labelings.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

inline std::vector<double> mid_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = rank;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(mid_ranks(x), mid_ranks(y));
}

// path: n*n position path lengths; d: n*n language distances. position_of[l]
// is the position holding language l. Returns the best correlation.
inline double best_labeling_correlation(const std::vector<double>& path, const std::vector<double>& d, int n) {
  std::vector<int> position_of(static_cast<std::size_t>(n));
  std::iota(position_of.begin(), position_of.end(), 0);
  std::vector<double> dv;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) dv.push_back(d[static_cast<std::size_t>(u * n + v)]);
  double best = -2.0;
  std::vector<double> pv(dv.size());
  do {
    std::size_t k = 0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        pv[k++] = path[static_cast<std::size_t>(position_of[static_cast<std::size_t>(u)] * n +
                                                position_of[static_cast<std::size_t>(v)])];
    best = std::max(best, spearman(pv, dv));
  } while (std::next_permutation(position_of.begin(), position_of.end()));
  return best;
}

}  // namespace oracle
