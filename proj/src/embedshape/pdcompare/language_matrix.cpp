#include <ostream>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/common/numfmt.hpp"
#include "embedshape/common/parallel.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"

namespace embedshape {

const char* diagram_method_name(DiagramMethod m) {
  switch (m) {
    case DiagramMethod::Bottleneck: return "bottleneck";
    case DiagramMethod::SlicedWasserstein: return "sliced_wasserstein";
    case DiagramMethod::PersistenceImage: return "persistence_image";
    case DiagramMethod::BarStatistics: return "bar_stats";
  }
  return "?";
}

DiagramMethod parse_diagram_method(std::string_view name) {
  for (auto m : {DiagramMethod::Bottleneck, DiagramMethod::SlicedWasserstein,
                 DiagramMethod::PersistenceImage, DiagramMethod::BarStatistics})
    if (name == diagram_method_name(m)) return m;
  throw ConfigError("unknown diagram comparison method '" + std::string(name) + "'");
}

DistanceMatrix language_distance_matrix(std::span<const std::string> languages,
                                        std::span<const PersistenceDiagram> diagrams,
                                        DiagramMethod method, const CompareConfig& config,
                                        int jobs) {
  const std::size_t n = languages.size();
  if (diagrams.size() != n) throw ConfigError("one diagram per language is required");
  for (std::size_t i = 1; i < n; ++i)
    if (diagrams[i].degree != diagrams[0].degree)
      throw DegreeMismatchError("diagrams of '" + languages[0] + "' and '" + languages[i] +
                                "' have different degrees");

  std::vector<PersistenceImage> images;
  std::vector<BarStatsVector> stats;
  if (method == DiagramMethod::PersistenceImage) {
    images.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) { images[i] = persistence_image(diagrams[i], config.image); });
  } else if (method == DiagramMethod::BarStatistics) {
    stats.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) { stats[i] = bar_statistics(diagrams[i]); });
  }

  auto pair_distance = [&](std::size_t i, std::size_t j) {
    switch (method) {
      case DiagramMethod::Bottleneck: return bottleneck_distance(diagrams[i], diagrams[j]);
      case DiagramMethod::SlicedWasserstein:
        return sliced_wasserstein_distance(diagrams[i], diagrams[j], config.sw_slices);
      case DiagramMethod::PersistenceImage: return image_distance(images[i], images[j]);
      case DiagramMethod::BarStatistics: return bar_stats_distance(stats[i], stats[j]);
    }
    return 0.0;
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<double> entries(n * n, 0.0);
  parallel_for(pairs.size(), jobs, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    try {
      const double d = pair_distance(i, j);
      entries[i * n + j] = d;
      entries[j * n + i] = d;
    } catch (const Error& e) {
      rethrow_with_context(e, "languages '" + languages[i] + "' and '" + languages[j] + "'");
    }
  });
  return DistanceMatrix(std::vector<std::string>(languages.begin(), languages.end()),
                        std::move(entries));
}

void write_vectors_csv(std::ostream& out, std::span<const std::string> languages,
                       std::span<const std::vector<double>> vectors) {
  for (std::size_t i = 0; i < languages.size(); ++i) {
    out << csv_escape(languages[i]);
    for (double v : vectors[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace embedshape
