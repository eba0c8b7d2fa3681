#include <cmath>
#include <numbers>

#include "embedshape/common/error.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"

namespace embedshape {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void validate(const ImageConfig& c) {
  if (c.rows < 1 || c.cols < 1) throw ConfigError("persistence image grid must be at least 1x1");
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma))
    throw ConfigError("persistence image sigma must be positive");
  if (!(c.range_max > c.range_min) || !std::isfinite(c.range_min) || !std::isfinite(c.range_max))
    throw ConfigError("persistence image range must satisfy range_min < range_max");
}

// Gaussian mass of each of `cells` equal intervals of [lo, hi] around `center`.
void interval_masses(double center, double sigma, double lo, double hi, int cells,
                     std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(cells));
  const double step = (hi - lo) / cells;
  double prev = normal_cdf((lo - center) / sigma);
  for (int i = 0; i < cells; ++i) {
    const double edge = (i + 1 == cells) ? hi : lo + (i + 1) * step;
    const double next = normal_cdf((edge - center) / sigma);
    out[static_cast<std::size_t>(i)] = std::max(0.0, next - prev);
    prev = next;
  }
}

}  // namespace

ImageConfig default_image_config(Metric metric, int degree) {
  ImageConfig c;
  c.rows = degree == 0 ? 1 : 10;
  c.cols = 10;
  if (metric == Metric::Cosine) {
    c.range_max = 1.0;
    c.sigma = 0.1;
  }
  return c;
}

PersistenceImage persistence_image(const PersistenceDiagram& diagram, const ImageConfig& config) {
  validate(config);
  PersistenceImage image{config, std::vector<double>(static_cast<std::size_t>(config.rows) * config.cols, 0.0)};
  std::vector<double> birth_mass, pers_mass;
  for (const Bar& bar : diagram.bars) {
    const double weight = bar.death - bar.birth;
    if (weight <= 0.0) continue;
    interval_masses(bar.birth, config.sigma, config.range_min, config.range_max, config.rows,
                    birth_mass);
    interval_masses(weight, config.sigma, config.range_min, config.range_max, config.cols,
                    pers_mass);
    for (int r = 0; r < config.rows; ++r)
      for (int c = 0; c < config.cols; ++c)
        image.pixels[static_cast<std::size_t>(r * config.cols + c)] +=
            weight * birth_mass[static_cast<std::size_t>(r)] * pers_mass[static_cast<std::size_t>(c)];
  }
  return image;
}

double image_distance(const PersistenceImage& p, const PersistenceImage& q) {
  if (!(p.config == q.config) || p.pixels.size() != q.pixels.size())
    throw ConfigError("persistence images were built with different configurations");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.pixels.size(); ++i) {
    const double diff = p.pixels[i] - q.pixels[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace embedshape
