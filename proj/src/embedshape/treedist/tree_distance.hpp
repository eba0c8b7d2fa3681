#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedshape/phylo/phylo_tree.hpp"

namespace embedshape {

// Leaf bipartition over sorted leaf indices; `bits` marks the side holding
// leaf 0 (the lexicographically smallest label).
struct Split {
  std::vector<std::uint64_t> bits;

  bool contains(std::size_t leaf) const { return (bits[leaf / 64] >> (leaf % 64)) & 1U; }
  friend auto operator<=>(const Split&, const Split&) = default;
};

Split make_split(std::span<const std::size_t> side, std::size_t n_leaves);
std::size_t split_side_size(const Split& s);

enum class TreeDistanceKind { Path, JRF1, JRF2, MatchingSplit, PhyloInfo, ClusterInfo };

const char* tree_distance_name(TreeDistanceKind k);
TreeDistanceKind parse_tree_distance(std::string_view name);
inline constexpr TreeDistanceKind kAllTreeDistances[] = {
    TreeDistanceKind::Path,          TreeDistanceKind::JRF1,      TreeDistanceKind::JRF2,
    TreeDistanceKind::MatchingSplit, TreeDistanceKind::PhyloInfo, TreeDistanceKind::ClusterInfo};

// A tree reduced to what the distances need: sorted labels, nontrivial
// unrooted splits and unit-edge leaf path lengths (root node kept).
class PreparedTree {
 public:
  // Throws InvalidTreeError on duplicate or empty leaf labels.
  explicit PreparedTree(const PhyloTree& tree);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t leaf_count() const noexcept { return labels_.size(); }
  const std::vector<Split>& splits() const noexcept { return splits_; }
  int path_length(std::size_t i, std::size_t j) const { return paths_[i * labels_.size() + j]; }

  // The same topology with the leaf labelled labels()[i] relabelled
  // labels()[perm[i]].
  PreparedTree relabeled(std::span<const std::size_t> perm) const;

 private:
  PreparedTree() = default;
  std::vector<std::string> labels_;
  std::vector<Split> splits_;
  std::vector<int> paths_;
};

std::vector<Split> enumerate_splits(const PhyloTree& tree);

// Frobenius norm of the difference of leaf path-length matrices over ordered
// pairs. Throws LabelMismatchError.
double path_distance(const PreparedTree& a, const PreparedTree& b);

// Pairwise split similarity for the split-based kinds; symmetric in (s, t).
double split_similarity(const Split& s, const Split& t, std::size_t n_leaves,
                        TreeDistanceKind kind);

// Value of a split on its own: 1 for JRF, its smaller side for the matching
// split distance, its phylogenetic or clustering information in bits.
double split_standalone(const Split& s, std::size_t n_leaves, TreeDistanceKind kind);

// Optimal split matching. JRF and the information distances report
// standalone(T1) + standalone(T2) - 2 * matched similarity; MatchingSplit
// reports the matched cost n - similarity, unmatched splits costing their
// smaller side.
double matched_split_distance(const PreparedTree& a, const PreparedTree& b,
                              TreeDistanceKind kind);

double tree_distance(const PreparedTree& a, const PreparedTree& b, TreeDistanceKind kind);
double tree_distance(const PhyloTree& a, const PhyloTree& b, TreeDistanceKind kind);

// Minimum-cost perfect assignment on a square row-major cost matrix; fills
// row_to_col and returns the optimal total.
double solve_assignment(std::span<const double> cost, std::size_t n,
                        std::vector<std::size_t>& row_to_col);

}  // namespace embedshape
