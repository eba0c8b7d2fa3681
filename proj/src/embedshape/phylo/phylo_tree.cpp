#include "embedshape/phylo/phylo_tree.hpp"

#include <functional>
#include <unordered_set>

#include "embedshape/common/error.hpp"

namespace embedshape {

int PhyloTree::add_node(std::string label, std::optional<double> length) {
  nodes_.push_back(PhyloNode{std::move(label), -1, {}, length});
  return static_cast<int>(nodes_.size()) - 1;
}

void PhyloTree::attach(int parent, int child) {
  node(parent).children.push_back(child);
  node(child).parent = parent;
}

std::vector<int> PhyloTree::postorder() const {
  std::vector<int> order;
  if (root_ < 0) return order;
  order.reserve(nodes_.size());
  // Iterative: (node, next child index).
  std::vector<std::pair<int, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const auto& kids = node(id).children;
    if (next < kids.size()) {
      const int child = kids[next++];
      stack.emplace_back(child, 0);
    } else {
      order.push_back(id);
      stack.pop_back();
    }
  }
  return order;
}

std::vector<int> PhyloTree::leaves() const {
  std::vector<int> out;
  for (int id : postorder())
    if (node(id).is_leaf()) out.push_back(id);
  return out;
}

std::vector<std::string> PhyloTree::leaf_labels() const {
  std::vector<std::string> out;
  for (int id : leaves()) out.push_back(node(id).label);
  return out;
}

std::vector<double> PhyloTree::root_to_leaf_lengths() const {
  std::vector<double> depth(nodes_.size(), 0.0);
  const auto order = postorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& n = node(*it);
    if (n.parent >= 0) depth[static_cast<std::size_t>(*it)] = depth[static_cast<std::size_t>(n.parent)] + n.length.value_or(0.0);
  }
  std::vector<double> out;
  for (int id : leaves()) out.push_back(depth[static_cast<std::size_t>(id)]);
  return out;
}

PhyloTree PhyloTree::restrict_to(std::span<const std::string> keep) const {
  const std::unordered_set<std::string> wanted(keep.begin(), keep.end());
  PhyloTree out;
  out.rooted_ = rooted_;

  // Returns the id of the copied subtree or -1 if nothing survives.
  std::function<int(int)> copy = [&](int id) -> int {
    const PhyloNode& n = node(id);
    if (n.is_leaf()) return wanted.contains(n.label) ? out.add_node(n.label, n.length) : -1;
    std::vector<int> kids;
    for (int c : n.children)
      if (int k = copy(c); k >= 0) kids.push_back(k);
    if (kids.empty()) return -1;
    if (kids.size() == 1) {
      PhyloNode& only = out.node(kids[0]);
      if (only.length || n.length) only.length = only.length.value_or(0.0) + n.length.value_or(0.0);
      return kids[0];
    }
    const int self = out.add_node(n.label, n.length);
    for (int k : kids) out.attach(self, k);
    return self;
  };
  const int r = root_ >= 0 ? copy(root_) : -1;
  if (r < 0) throw InsufficientLeavesError("no requested leaves are present in the tree");
  out.root_ = r;
  out.node(r).length.reset();
  out.node(r).parent = -1;
  return out;
}

}  // namespace embedshape
