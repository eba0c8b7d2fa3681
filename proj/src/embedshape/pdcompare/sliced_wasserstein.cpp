#include <algorithm>
#include <cmath>
#include <numbers>

#include "embedshape/common/error.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"

namespace embedshape {

double sliced_wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   int n_slices) {
  if (a.degree != b.degree)
    throw DegreeMismatchError("sliced Wasserstein distance between degree " +
                              std::to_string(a.degree) + " and degree " +
                              std::to_string(b.degree) + " diagrams");
  if (n_slices < 1) throw ConfigError("n_slices must be at least 1");

  // Each side gets its own points plus the diagonal projections of the other.
  auto augment = [](const PersistenceDiagram& own, const PersistenceDiagram& other) {
    std::vector<Bar> pts = own.bars;
    pts.reserve(own.size() + other.size());
    for (const Bar& p : other.bars) {
      const double m = (p.birth + p.death) / 2.0;
      pts.push_back({m, m});
    }
    return pts;
  };
  const std::vector<Bar> pa = augment(a, b);
  const std::vector<Bar> pb = augment(b, a);

  std::vector<double> xa(pa.size()), xb(pb.size());
  double total = 0.0;
  for (int k = 0; k < n_slices; ++k) {
    const double theta = -std::numbers::pi / 2.0 + k * std::numbers::pi / n_slices;
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t i = 0; i < pa.size(); ++i) xa[i] = c * pa[i].birth + s * pa[i].death;
    for (std::size_t i = 0; i < pb.size(); ++i) xb[i] = c * pb[i].birth + s * pb[i].death;
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    double slice = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) slice += std::abs(xa[i] - xb[i]);
    total += slice;
  }
  return total / n_slices;
}

}  // namespace embedshape
