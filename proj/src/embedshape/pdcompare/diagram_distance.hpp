#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedshape/embedding/distance_matrix.hpp"
#include "embedshape/embedding/embedding.hpp"
#include "embedshape/ph/persistence_diagram.hpp"

namespace embedshape {

// Exact bottleneck distance: binary search over the finite set of candidate
// costs (pairwise l-infinity costs and half-persistences), each tested by a
// perfect-matching feasibility check in the diagonal-augmented bipartite
// graph. Throws DegreeMismatchError for diagrams of different degree.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

inline constexpr int kDefaultSlices = 50;

// Mean over n_slices evenly spaced directions in [-pi/2, pi/2) of the 1-D
// transport cost between the projections of each diagram augmented with the
// diagonal projections of the other. Deterministic.
double sliced_wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   int n_slices = kDefaultSlices);

// Grid over birth (rows) x persistence (cols), both spanning the same range.
struct ImageConfig {
  int rows = 10;
  int cols = 10;
  double range_min = 0.0;
  double range_max = 10.0;
  double sigma = 1.0;
  friend bool operator==(const ImageConfig&, const ImageConfig&) = default;
};

// 10x10 for degrees >= 1, 1x10 for degree 0; range [0,10] with sigma 1 for
// Euclidean embeddings, [0,1] with sigma 0.1 for cosine.
ImageConfig default_image_config(Metric metric, int degree);

struct PersistenceImage {
  ImageConfig config;
  std::vector<double> pixels;  // rows x cols, row-major

  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row * config.cols + col)]; }
};

// Each bar (b, d) becomes a normalised isotropic Gaussian centred at
// (b, d - b) with height d - b; a pixel holds the exact integral of the sum
// over its rectangle. Bars outside the range still contribute their tails.
PersistenceImage persistence_image(const PersistenceDiagram& diagram, const ImageConfig& config);

// l2 distance between pixel vectors; ConfigError if the configs differ.
double image_distance(const PersistenceImage& p, const PersistenceImage& q);

inline constexpr int kStatisticsPerCoordinate = 10;

// mean, median, population std, IQR, full range, p10, p25, p75, p90, entropy
// for each of b, d, d-b, (b+d)/2 (degree >= 1) or d alone (degree 0).
struct BarStatsVector {
  std::vector<double> values;
};

BarStatsVector bar_statistics(const PersistenceDiagram& diagram);

// Linear interpolation between closest ranks on sorted values, q in [0, 1].
double percentile_sorted(std::span<const double> sorted, double q);

double bar_stats_distance(const BarStatsVector& u, const BarStatsVector& v);

enum class DiagramMethod { Bottleneck, SlicedWasserstein, PersistenceImage, BarStatistics };

const char* diagram_method_name(DiagramMethod m);
DiagramMethod parse_diagram_method(std::string_view name);

struct CompareConfig {
  int sw_slices = kDefaultSlices;
  ImageConfig image;
};

// Language-by-language distance matrix over diagrams of one degree. Vector
// methods vectorise each language once. Per-pair failures are rethrown with
// the offending pair named.
DistanceMatrix language_distance_matrix(std::span<const std::string> languages,
                                        std::span<const PersistenceDiagram> diagrams,
                                        DiagramMethod method, const CompareConfig& config,
                                        int jobs = 1);

// Cached vectorisations: "language,v0,v1,..." rows.
void write_vectors_csv(std::ostream& out, std::span<const std::string> languages,
                       std::span<const std::vector<double>> vectors);

}  // namespace embedshape
