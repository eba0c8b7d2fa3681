#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "embedshape/embedding/distance_matrix.hpp"
#include "embedshape/phylo/phylo_tree.hpp"
#include "embedshape/treedist/tree_distance.hpp"

namespace embedshape {

// Observed statistic against a seeded permutation distribution. "Better"
// means smaller for distances and larger for correlations.
struct SignificanceReport {
  double observed = 0.0;
  double perm_mean = 0.0;
  double perm_std = 0.0;  // population
  // (mean - observed) / std for distances, (observed - mean) / std for
  // correlations; only meaningful when z_defined.
  double z_score = 0.0;
  bool z_defined = false;
  std::size_t n_strictly_better = 0;
  std::size_t n_ties = 0;
  std::size_t rank = 0;  // permutations at least as good as observed
  std::size_t n_permutations = 0;
  double rank_p_value = 0.0;  // n_strictly_better / n_permutations
  std::uint64_t seed = 0;
  std::string metric_kind;
  bool higher_is_better = false;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

// Fills every derived field from the observed value and the samples.
SignificanceReport summarize_permutations(double observed, std::span<const double> samples,
                                          bool higher_is_better);

// Relabels T's leaves uniformly at random n times (permutation i drawn from
// stream i of the seed) and compares each relabelled tree with R.
SignificanceReport leaf_permutation_test(const PhyloTree& t, const PhyloTree& r,
                                         TreeDistanceKind kind, std::size_t n,
                                         std::uint64_t seed, int jobs = 1);

// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman correlation of the strictly-upper triangles. Throws
// LabelMismatchError for differing labels and DegenerateCorrelationError when
// either triangle is constant.
double spearman_matrix_correlation(const DistanceMatrix& e, const DistanceMatrix& d);

struct QapOptions {
  std::size_t restarts = 100;
  std::size_t stall_limit = 2000;
  std::uint64_t seed = 0;
  int jobs = 1;
  // Called after every accepted flip with (restart, correlation); restarts
  // run sequentially when set.
  std::function<void(std::size_t, double)> on_accept;
};

struct LabelingResult {
  std::vector<std::string> positions;  // the tree's leaf labels, sorted
  std::vector<std::string> permutation;  // language placed at each position
  double correlation = 0.0;
  std::size_t restarts = 0;
  std::size_t flips_accepted = 0;  // over all restarts
};

// Searches labelings of the fixed tree topology for maximal rank correlation
// between its unit-edge path matrix and D by random-transposition hill
// climbing; the best of `restarts` independent climbs is returned.
LabelingResult qap_flip_optimize(const PhyloTree& tree, const DistanceMatrix& d,
                                 const QapOptions& options);

// Correlation of an explicit labeling (position i gets language labeling[i]).
double labeling_correlation(const PhyloTree& tree, const DistanceMatrix& d,
                            std::span<const std::string> labeling);

SignificanceReport labeling_permutation_test(const PhyloTree& tree, const LabelingResult& labeling,
                                             const DistanceMatrix& d, std::size_t n,
                                             std::uint64_t seed, int jobs = 1);

// The tree with each position's leaf renamed to its assigned language.
PhyloTree apply_labeling(const PhyloTree& tree, const LabelingResult& labeling);

nlohmann::ordered_json report_to_json(const SignificanceReport& r);
SignificanceReport report_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json labeling_to_json(const LabelingResult& r);

}  // namespace embedshape
