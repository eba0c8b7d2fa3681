#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "embedshape/embedding/embedding.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"
#include "embedshape/phylo/phylo_tree.hpp"
#include "embedshape/treedist/tree_distance.hpp"

namespace embedshape {

struct LanguageInput {
  std::string id;
  std::filesystem::path embedding_path;
};

struct QapConfig {
  bool enabled = false;
  std::size_t restarts = 100;
  std::size_t stall_limit = 2000;
  std::size_t n_permutations = 1000;
};

struct RunConfig {
  std::vector<LanguageInput> languages;  // in resource-rank order
  std::filesystem::path reference_tree_path;
  std::size_t token_count = 10000;
  std::vector<Metric> metrics{Metric::Euclidean, Metric::Cosine};
  std::vector<int> degrees{0, 1, 2};
  std::vector<DiagramMethod> diagram_distances{DiagramMethod::Bottleneck, DiagramMethod::SlicedWasserstein,
                                               DiagramMethod::PersistenceImage, DiagramMethod::BarStatistics};
  std::vector<TreeAlgorithm> tree_algorithms{TreeAlgorithm::Upgma, TreeAlgorithm::NeighborJoining};
  std::vector<TreeDistanceKind> tree_metrics{std::begin(kAllTreeDistances), std::end(kAllTreeDistances)};
  // Prefix sizes of the language list; empty means all languages.
  std::vector<std::size_t> language_counts;
  std::size_t n_permutations = 100000;
  std::uint64_t seed = 0;
  int sw_slices = kDefaultSlices;
  // Per-metric image parameters; degree 0 always uses a single row.
  ImageConfig image_euclidean = default_image_config(Metric::Euclidean, 1);
  ImageConfig image_cosine = default_image_config(Metric::Cosine, 1);
  std::optional<double> ph_threshold;
  bool ph_cap_at_threshold = false;
  QapConfig qap;
  bool plots = true;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path output_dir = "out";
  int jobs = 1;

  ImageConfig image_config(Metric m, int degree) const;
  std::vector<std::size_t> effective_language_counts() const;
  // Number of trees and reports the grid asks for.
  std::size_t planned_trees() const;
  std::size_t planned_reports() const;
};

// Parses the JSON document; relative paths resolve against base_dir. Unknown
// keys are rejected. EMBEDSHAPE_CACHE, when set, overrides cache_dir.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON form (absolute paths, every field present) used for hashing.
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// One derived config per count, each keeping a prefix of the language list.
// Throws ConfigError when a count exceeds the number of languages.
std::vector<RunConfig> subset_languages(const RunConfig& config, const std::vector<std::size_t>& counts);

// The reference tree restricted to `languages`, with single-child nodes
// spliced out. Throws LabelMismatchError if a language is not a leaf.
PhyloTree restrict_reference(const PhyloTree& reference, const std::vector<std::string>& languages);

}  // namespace embedshape
