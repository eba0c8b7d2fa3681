#include <algorithm>
#include <cmath>
#include <numeric>

#include "embedshape/common/error.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"

namespace embedshape {
namespace {

void append_statistics(std::vector<double> v, std::vector<double>& out) {
  if (v.empty()) {
    out.insert(out.end(), kStatisticsPerCoordinate, 0.0);
    return;
  }
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  const double mean = sum / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  const double p10 = percentile_sorted(v, 0.10);
  const double p25 = percentile_sorted(v, 0.25);
  const double p75 = percentile_sorted(v, 0.75);
  const double p90 = percentile_sorted(v, 0.90);

  double entropy = 0.0;
  if (v.front() > 0.0) {
    for (double x : v) {
      const double p = x / sum;
      entropy -= p * std::log(p);
    }
  }
  out.insert(out.end(), {mean, percentile_sorted(v, 0.5), std::sqrt(var), p75 - p25,
                         v.back() - v.front(), p10, p25, p75, p90, entropy});
}

}  // namespace

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BarStatsVector bar_statistics(const PersistenceDiagram& diagram) {
  BarStatsVector result;
  std::vector<double> births, deaths, lengths, midpoints;
  for (const Bar& bar : diagram.bars) {
    births.push_back(bar.birth);
    deaths.push_back(bar.death);
    lengths.push_back(bar.death - bar.birth);
    midpoints.push_back((bar.birth + bar.death) / 2.0);
  }
  if (diagram.degree == 0) {
    result.values.reserve(kStatisticsPerCoordinate);
    append_statistics(std::move(deaths), result.values);
  } else {
    result.values.reserve(4 * kStatisticsPerCoordinate);
    append_statistics(std::move(births), result.values);
    append_statistics(std::move(deaths), result.values);
    append_statistics(std::move(lengths), result.values);
    append_statistics(std::move(midpoints), result.values);
  }
  return result;
}

double bar_stats_distance(const BarStatsVector& u, const BarStatsVector& v) {
  if (u.values.size() != v.values.size())
    throw ConfigError("bar statistics vectors have different lengths (" +
                      std::to_string(u.values.size()) + " vs " + std::to_string(v.values.size()) +
                      ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double d = u.values[i] - v.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace embedshape
