#include <algorithm>
#include <limits>

#include "embedshape/common/error.hpp"
#include "embedshape/phylo/phylo_tree.hpp"

namespace embedshape {
namespace {

// A cluster is named by its smallest leaf label; ties between equally good
// merges go to the lexicographically smallest (sorted) name pair.
struct Cluster {
  int node;
  std::string name;
  double size = 1.0;
  double height = 0.0;
};

using NamePair = std::pair<const std::string*, const std::string*>;

NamePair sorted_names(const Cluster& a, const Cluster& b) {
  return a.name < b.name ? NamePair{&a.name, &b.name} : NamePair{&b.name, &a.name};
}

bool pair_less(const NamePair& x, const NamePair& y) {
  if (*x.first != *y.first) return *x.first < *y.first;
  return *x.second < *y.second;
}

// Square working matrix over active cluster slots.
struct Work {
  std::size_t n;
  std::vector<double> v;
  double& operator()(std::size_t i, std::size_t j) { return v[i * n + j]; }
};

std::vector<Cluster> leaf_clusters(const DistanceMatrix& d, PhyloTree& tree, Work& w) {
  const std::size_t n = d.size();
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({tree.add_node(d.label(i)), d.label(i)});
  w = Work{n, d.entries()};
  return clusters;
}

// Joins clusters a and b under a new node; the child with the smaller name
// goes first.
int join(PhyloTree& tree, const Cluster& a, double la, const Cluster& b, double lb) {
  const int u = tree.add_node();
  tree.node(a.node).length = la;
  tree.node(b.node).length = lb;
  if (a.name < b.name) {
    tree.attach(u, a.node);
    tree.attach(u, b.node);
  } else {
    tree.attach(u, b.node);
    tree.attach(u, a.node);
  }
  return u;
}

}  // namespace

PhyloTree upgma(const DistanceMatrix& d) {
  if (d.size() < 2) throw InsufficientLeavesError("UPGMA needs at least 2 labels, got " + std::to_string(d.size()));
  PhyloTree tree;
  Work w;
  std::vector<Cluster> clusters = leaf_clusters(d, tree, w);
  std::vector<std::size_t> active(d.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    NamePair best_names{};
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double v = w(active[x], active[y]);
        const NamePair names = sorted_names(clusters[active[x]], clusters[active[y]]);
        if (v < best || (v == best && pair_less(names, best_names))) {
          best = v;
          best_names = names;
          bi = x;
          bj = y;
        }
      }
    }
    const std::size_t a = active[bi], b = active[bj];
    Cluster& ca = clusters[a];
    const Cluster& cb = clusters[b];
    const double height = best / 2.0;
    const int u = join(tree, ca, std::max(0.0, height - ca.height), cb,
                       std::max(0.0, height - cb.height));
    for (std::size_t c : active) {
      if (c == a || c == b) continue;
      const double merged = (ca.size * w(a, c) + cb.size * w(b, c)) / (ca.size + cb.size);
      w(a, c) = w(c, a) = merged;
    }
    ca = Cluster{u, std::min(ca.name, cb.name), ca.size + cb.size, height};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  tree.set_root(clusters[active[0]].node);
  tree.set_rooted(true);
  return tree;
}

PhyloTree neighbor_joining(const DistanceMatrix& d) {
  if (d.size() < 3)
    throw InsufficientLeavesError("neighbor joining needs at least 3 labels, got " + std::to_string(d.size()));
  PhyloTree tree;
  Work w;
  std::vector<Cluster> clusters = leaf_clusters(d, tree, w);
  std::vector<std::size_t> active(d.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

  std::vector<double> alpha(d.size());
  while (active.size() > 3) {
    const double m = static_cast<double>(active.size());
    for (std::size_t a : active) {
      double sum = 0.0;
      for (std::size_t b : active) sum += w(a, b);
      alpha[a] = sum / (m - 2.0);
    }
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    NamePair best_names{};
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t a = active[x], b = active[y];
        const double q = w(a, b) - alpha[a] - alpha[b];
        const NamePair names = sorted_names(clusters[a], clusters[b]);
        if (q < best || (q == best && pair_less(names, best_names))) {
          best = q;
          best_names = names;
          bi = x;
          bj = y;
        }
      }
    }
    const std::size_t a = active[bi], b = active[bj];
    const double dab = w(a, b);
    const double la = 0.5 * dab + 0.5 * (alpha[a] - alpha[b]);
    const int u = join(tree, clusters[a], la, clusters[b], dab - la);
    for (std::size_t c : active) {
      if (c == a || c == b) continue;
      w(a, c) = w(c, a) = (w(a, c) + w(b, c) - dab) / 2.0;
    }
    clusters[a] = Cluster{u, std::min(clusters[a].name, clusters[b].name)};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  // Three clusters left: solve l_x + l_y = D(x, y) for the trifurcating root.
  std::sort(active.begin(), active.end(),
            [&](std::size_t x, std::size_t y) { return clusters[x].name < clusters[y].name; });
  const std::size_t a = active[0], b = active[1], c = active[2];
  const int root = tree.add_node();
  tree.node(clusters[a].node).length = (w(a, b) + w(a, c) - w(b, c)) / 2.0;
  tree.node(clusters[b].node).length = (w(a, b) + w(b, c) - w(a, c)) / 2.0;
  tree.node(clusters[c].node).length = (w(a, c) + w(b, c) - w(a, b)) / 2.0;
  for (std::size_t x : active) tree.attach(root, clusters[x].node);
  tree.set_root(root);
  tree.set_rooted(false);
  return tree;
}

const char* tree_algorithm_name(TreeAlgorithm a) {
  return a == TreeAlgorithm::Upgma ? "upgma" : "nj";
}

TreeAlgorithm parse_tree_algorithm(std::string_view name) {
  if (name == "upgma") return TreeAlgorithm::Upgma;
  if (name == "nj" || name == "neighbor_joining") return TreeAlgorithm::NeighborJoining;
  throw ConfigError("unknown tree algorithm '" + std::string(name) + "'");
}

PhyloTree build_tree(const DistanceMatrix& d, TreeAlgorithm algorithm) {
  return algorithm == TreeAlgorithm::Upgma ? upgma(d) : neighbor_joining(d);
}

}  // namespace embedshape
