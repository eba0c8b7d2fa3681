#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedshape/embedding/distance_matrix.hpp"

namespace embedshape {

struct PhyloNode {
  std::string label;           // leaves always carry one; internal nodes may
  int parent = -1;
  std::vector<int> children;
  std::optional<double> length;  // edge to the parent; absent in unweighted trees

  bool is_leaf() const noexcept { return children.empty(); }
};

// Node-vector tree. `rooted` is false for trees whose root is only a
// serialization artifact (neighbor joining, parsed Newick with a 3-way root).
class PhyloTree {
 public:
  PhyloTree() = default;

  int add_node(std::string label = {}, std::optional<double> length = std::nullopt);
  void attach(int parent, int child);
  void set_root(int root) { root_ = root; }
  void set_rooted(bool rooted) { rooted_ = rooted; }

  int root() const noexcept { return root_; }
  bool rooted() const noexcept { return rooted_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const PhyloNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  PhyloNode& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }

  // Leaf node ids in depth-first (left to right) order.
  std::vector<int> leaves() const;
  std::vector<std::string> leaf_labels() const;
  // Node ids with every child before its parent.
  std::vector<int> postorder() const;

  // Sum of edge lengths from the root to each leaf, keyed like leaves().
  std::vector<double> root_to_leaf_lengths() const;

  // Keeps only the named leaves, dropping emptied subtrees and splicing out
  // nodes left with a single child (their edge lengths are summed).
  PhyloTree restrict_to(std::span<const std::string> keep) const;

 private:
  std::vector<PhyloNode> nodes_;
  int root_ = -1;
  bool rooted_ = true;
};

// Newick with branch lengths; integral lengths keep a ".0". Labels needing
// it are single-quoted.
std::string write_newick(const PhyloTree& tree);

// Accepts weighted and unweighted Newick, quoted labels, internal node labels
// and [bracketed] comments. A root with three or more children is read as
// unrooted. Throws ParseError.
PhyloTree parse_newick(std::string_view text);

PhyloTree read_newick_file(const std::filesystem::path& path);

// Average-linkage clustering; binary, ultrametric, rooted.
// Throws InsufficientLeavesError for fewer than 2 labels.
PhyloTree upgma(const DistanceMatrix& d);

// Saitou-Nei neighbor joining with halved edge lengths, ending in a
// trifurcating root. Negative lengths are kept.
// Throws InsufficientLeavesError for fewer than 3 labels.
PhyloTree neighbor_joining(const DistanceMatrix& d);

enum class TreeAlgorithm { Upgma, NeighborJoining };
const char* tree_algorithm_name(TreeAlgorithm a);
TreeAlgorithm parse_tree_algorithm(std::string_view name);
PhyloTree build_tree(const DistanceMatrix& d, TreeAlgorithm algorithm);

}  // namespace embedshape
