#include <algorithm>
#include <bit>
#include <cmath>

#include "embedshape/common/error.hpp"
#include "embedshape/treedist/tree_distance.hpp"

namespace embedshape {
namespace {

std::size_t intersection(const Split& s, const Split& t) {
  std::size_t c = 0;
  for (std::size_t w = 0; w < s.bits.size(); ++w)
    c += static_cast<std::size_t>(std::popcount(s.bits[w] & t.bits[w]));
  return c;
}

// log2 of x!! for odd x >= -1, from a per-thread prefix table.
double log2_double_factorial(long x) {
  thread_local std::vector<double> table{0.0};  // table[m] = log2((2m-1)!!)
  const auto m = static_cast<std::size_t>((x + 1) / 2);
  while (table.size() <= m) {
    const double next_odd = 2.0 * static_cast<double>(table.size()) - 1.0;
    table.push_back(table.back() + std::log2(next_odd));
  }
  return table[m];
}

// log2 of the number of rooted binary trees on k leaves, (2k-3)!!.
double log2_rooted(std::size_t k) { return log2_double_factorial(2 * static_cast<long>(k) - 3); }

// log2 of the number of unrooted binary trees on n >= 3 leaves, (2n-5)!!.
double log2_unrooted(std::size_t n) { return log2_double_factorial(2 * static_cast<long>(n) - 5); }

double phylo_info(std::size_t a, std::size_t b) {
  return log2_unrooted(a + b) - (log2_rooted(a) + log2_rooted(b));
}

double entropy_bits(std::size_t a, std::size_t n) {
  double h = 0.0;
  for (std::size_t k : {a, n - a}) {
    if (k == 0) continue;
    const double p = static_cast<double>(k) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

void require_same_labels(const PreparedTree& a, const PreparedTree& b) {
  if (a.labels() != b.labels())
    throw LabelMismatchError("trees have different leaf label sets (" + std::to_string(a.leaf_count()) +
                             " vs " + std::to_string(b.leaf_count()) + " leaves)");
}

// Sum that does not depend on the order the terms were produced in.
double order_free_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

const char* tree_distance_name(TreeDistanceKind k) {
  switch (k) {
    case TreeDistanceKind::Path: return "path";
    case TreeDistanceKind::JRF1: return "jrf1";
    case TreeDistanceKind::JRF2: return "jrf2";
    case TreeDistanceKind::MatchingSplit: return "matching_split";
    case TreeDistanceKind::PhyloInfo: return "phylo_info";
    case TreeDistanceKind::ClusterInfo: return "cluster_info";
  }
  return "?";
}

TreeDistanceKind parse_tree_distance(std::string_view name) {
  for (auto k : kAllTreeDistances)
    if (name == tree_distance_name(k)) return k;
  throw ConfigError("unknown tree distance '" + std::string(name) + "'");
}

double path_distance(const PreparedTree& a, const PreparedTree& b) {
  require_same_labels(a, b);
  const std::size_t n = a.leaf_count();
  long long sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const long long d = a.path_length(i, j) - b.path_length(i, j);
      sum += d * d;
    }
  return std::sqrt(static_cast<double>(sum));
}

double split_standalone(const Split& s, std::size_t n, TreeDistanceKind kind) {
  const std::size_t a = split_side_size(s);
  switch (kind) {
    case TreeDistanceKind::JRF1:
    case TreeDistanceKind::JRF2: return 1.0;
    case TreeDistanceKind::MatchingSplit: return static_cast<double>(std::min(a, n - a));
    case TreeDistanceKind::PhyloInfo: return phylo_info(a, n - a);
    case TreeDistanceKind::ClusterInfo: return entropy_bits(a, n);
    case TreeDistanceKind::Path: break;
  }
  throw ConfigError("path distance has no split similarity");
}

double split_similarity(const Split& s, const Split& t, std::size_t n, TreeDistanceKind kind) {
  if (s.bits.size() != t.bits.size()) throw LabelMismatchError("splits over different leaf sets");
  if (s == t) {
    if (kind == TreeDistanceKind::MatchingSplit) return static_cast<double>(n);
    return split_standalone(s, n, kind);
  }
  const std::size_t n0 = split_side_size(s), m0 = split_side_size(t);
  const std::size_t n1 = n - n0, m1 = n - m0;
  const std::size_t a00 = intersection(s, t);
  const std::size_t a01 = n0 - a00, a10 = m0 - a00, a11 = n1 - a10;

  switch (kind) {
    case TreeDistanceKind::JRF1:
    case TreeDistanceKind::JRF2: {
      auto jaccard = [](std::size_t inter, std::size_t x, std::size_t y) {
        return static_cast<double>(inter) / static_cast<double>(x + y - inter);
      };
      const double j = std::max(std::min(jaccard(a00, n0, m0), jaccard(a11, n1, m1)),
                                std::min(jaccard(a01, n0, m1), jaccard(a10, n1, m0)));
      return kind == TreeDistanceKind::JRF1 ? j : j * j;
    }
    case TreeDistanceKind::MatchingSplit:
      return static_cast<double>(std::max(a00 + a11, a01 + a10));
    case TreeDistanceKind::ClusterInfo: {
      const double dn = static_cast<double>(n);
      const std::size_t cells[4][3] = {{a00, n0, m0}, {a01, n0, m1}, {a10, n1, m0}, {a11, n1, m1}};
      std::vector<double> terms;
      for (const auto& c : cells) {
        if (c[0] == 0) continue;
        const double p = static_cast<double>(c[0]) / dn;
        terms.push_back(p * std::log2(static_cast<double>(c[0]) * dn /
                                      (static_cast<double>(c[1]) * static_cast<double>(c[2]))));
      }
      return std::max(0.0, order_free_sum(terms));
    }
    case TreeDistanceKind::PhyloInfo: {
      // Compatible splits leave one block intersection empty; the two clades
      // X and Y it separates hang off a middle of m leaves.
      std::size_t x = 0, y = 0;
      if (a00 == 0) x = n0, y = m0;
      else if (a01 == 0) x = n0, y = m1;
      else if (a10 == 0) x = n1, y = m0;
      else if (a11 == 0) x = n1, y = m1;
      else return 0.0;
      const std::size_t m = n - x - y;
      const double joint = log2_unrooted(n) - (log2_rooted(x) + log2_rooted(y)) -
                           log2_double_factorial(2 * static_cast<long>(m) - 1);
      return std::max(0.0, (phylo_info(n0, n1) + phylo_info(m0, m1)) - joint);
    }
    case TreeDistanceKind::Path: break;
  }
  throw ConfigError("path distance has no split similarity");
}

double matched_split_distance(const PreparedTree& a, const PreparedTree& b, TreeDistanceKind kind) {
  require_same_labels(a, b);
  if (kind == TreeDistanceKind::Path) throw ConfigError("path distance is not split based");
  const std::size_t n = a.leaf_count();
  // Both argument orders run the same arithmetic.
  if (b.splits() < a.splits()) return matched_split_distance(b, a, kind);
  const auto& sa = a.splits();
  const auto& sb = b.splits();
  const std::size_t size = std::max(sa.size(), sb.size());
  if (size == 0) return 0.0;

  std::vector<double> va(sa.size()), vb(sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) va[i] = split_standalone(sa[i], n, kind);
  for (std::size_t j = 0; j < sb.size(); ++j) vb[j] = split_standalone(sb[j], n, kind);

  // Each cell holds that pairing's contribution to the distance; a missing
  // partner contributes the split's standalone value.
  const bool matching = kind == TreeDistanceKind::MatchingSplit;
  std::vector<double> cost(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      double c = 0.0;
      if (i < sa.size() && j < sb.size()) {
        const double sim = split_similarity(sa[i], sb[j], n, kind);
        c = matching ? static_cast<double>(n) - sim : (va[i] + vb[j]) - 2.0 * sim;
      } else if (i < sa.size()) {
        c = va[i];
      } else if (j < sb.size()) {
        c = vb[j];
      }
      cost[i * size + j] = c;
    }
  }
  std::vector<std::size_t> assignment;
  solve_assignment(cost, size, assignment);
  std::vector<double> terms(size);
  for (std::size_t i = 0; i < size; ++i) terms[i] = cost[i * size + assignment[i]];
  return std::max(0.0, order_free_sum(terms));
}

double tree_distance(const PreparedTree& a, const PreparedTree& b, TreeDistanceKind kind) {
  if (kind == TreeDistanceKind::Path) return path_distance(a, b);
  return matched_split_distance(a, b, kind);
}

double tree_distance(const PhyloTree& a, const PhyloTree& b, TreeDistanceKind kind) {
  return tree_distance(PreparedTree(a), PreparedTree(b), kind);
}

}  // namespace embedshape
