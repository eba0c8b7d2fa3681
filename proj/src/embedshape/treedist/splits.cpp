#include <algorithm>
#include <bit>
#include <queue>
#include <unordered_map>

#include "embedshape/common/error.hpp"
#include "embedshape/treedist/tree_distance.hpp"

namespace embedshape {
namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

void set_bit(std::vector<std::uint64_t>& bits, std::size_t i) { bits[i / 64] |= std::uint64_t{1} << (i % 64); }

std::size_t popcount(const std::vector<std::uint64_t>& bits) {
  std::size_t c = 0;
  for (auto w : bits) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

// Flips to the side containing leaf 0 when needed.
void canonicalize(std::vector<std::uint64_t>& bits, std::size_t n) {
  if (bits[0] & 1U) return;
  for (auto& w : bits) w = ~w;
  if (n % 64) bits.back() &= (std::uint64_t{1} << (n % 64)) - 1;
}

void sort_unique(std::vector<Split>& splits) {
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
}

}  // namespace

Split make_split(std::span<const std::size_t> side, std::size_t n_leaves) {
  Split s{std::vector<std::uint64_t>(words_for(n_leaves), 0)};
  for (std::size_t i : side) set_bit(s.bits, i);
  canonicalize(s.bits, n_leaves);
  return s;
}

std::size_t split_side_size(const Split& s) { return popcount(s.bits); }

PreparedTree::PreparedTree(const PhyloTree& tree) {
  const std::vector<int> leaf_nodes = tree.leaves();
  for (int id : leaf_nodes) {
    if (tree.node(id).label.empty()) throw InvalidTreeError("tree has an unlabelled leaf");
    labels_.push_back(tree.node(id).label);
  }
  std::sort(labels_.begin(), labels_.end());
  if (auto dup = std::adjacent_find(labels_.begin(), labels_.end()); dup != labels_.end())
    throw InvalidTreeError("duplicate leaf label '" + *dup + "'");
  const std::size_t n = labels_.size();

  std::vector<long> leaf_index(tree.node_count(), -1);
  for (int id : leaf_nodes) {
    const auto pos = std::lower_bound(labels_.begin(), labels_.end(), tree.node(id).label);
    leaf_index[static_cast<std::size_t>(id)] = pos - labels_.begin();
  }

  // Leaf sets below every node, children first.
  std::vector<std::vector<std::uint64_t>> below(tree.node_count());
  for (int id : tree.postorder()) {
    auto& bits = below[static_cast<std::size_t>(id)];
    bits.assign(words_for(n), 0);
    if (leaf_index[static_cast<std::size_t>(id)] >= 0) set_bit(bits, static_cast<std::size_t>(leaf_index[static_cast<std::size_t>(id)]));
    for (int c : tree.node(id).children)
      for (std::size_t w = 0; w < bits.size(); ++w) bits[w] |= below[static_cast<std::size_t>(c)][w];
    if (id == tree.root()) continue;
    const std::size_t size = popcount(bits);
    if (size < 2 || n - size < 2) continue;
    Split s{bits};
    canonicalize(s.bits, n);
    splits_.push_back(std::move(s));
  }
  sort_unique(splits_);

  // Unit-edge path lengths by breadth-first search from every leaf.
  const std::size_t nodes = tree.node_count();
  std::vector<std::vector<int>> adj(nodes);
  for (std::size_t id = 0; id < nodes; ++id) {
    const int parent = tree.node(static_cast<int>(id)).parent;
    if (parent >= 0) {
      adj[id].push_back(parent);
      adj[static_cast<std::size_t>(parent)].push_back(static_cast<int>(id));
    }
  }
  paths_.assign(n * n, 0);
  std::vector<int> dist(nodes);
  for (int src : leaf_nodes) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[static_cast<std::size_t>(u)])
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
    }
    const auto i = static_cast<std::size_t>(leaf_index[static_cast<std::size_t>(src)]);
    for (int dst : leaf_nodes)
      paths_[i * n + static_cast<std::size_t>(leaf_index[static_cast<std::size_t>(dst)])] = dist[static_cast<std::size_t>(dst)];
  }
}

PreparedTree PreparedTree::relabeled(std::span<const std::size_t> perm) const {
  const std::size_t n = labels_.size();
  if (perm.size() != n) throw LabelMismatchError("relabelling permutation has the wrong length");
  PreparedTree out;
  out.labels_ = labels_;
  out.splits_.reserve(splits_.size());
  for (const Split& s : splits_) {
    Split t{std::vector<std::uint64_t>(words_for(n), 0)};
    for (std::size_t i = 0; i < n; ++i)
      if (s.contains(i)) set_bit(t.bits, perm[i]);
    canonicalize(t.bits, n);
    out.splits_.push_back(std::move(t));
  }
  std::sort(out.splits_.begin(), out.splits_.end());
  out.paths_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.paths_[perm[i] * n + perm[j]] = paths_[i * n + j];
  return out;
}

std::vector<Split> enumerate_splits(const PhyloTree& tree) { return PreparedTree(tree).splits(); }

}  // namespace embedshape
