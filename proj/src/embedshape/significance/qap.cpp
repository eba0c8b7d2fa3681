#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "embedshape/common/error.hpp"
#include "embedshape/common/parallel.hpp"
#include "embedshape/common/rng.hpp"
#include "embedshape/significance/significance.hpp"

namespace embedshape {
namespace {

// Centered average ranks of a strictly-upper triangle, stored as a full
// symmetric matrix. Ranks are multiples of 1/2, so every score below is a
// sum of multiples of 1/4 and exact in double precision.
struct RankMatrix {
  std::size_t n = 0;
  std::vector<double> m;
  double norm2 = 0.0;

  double operator()(std::size_t i, std::size_t j) const { return m[i * n + j]; }
};

RankMatrix centred_ranks(std::size_t n, const std::function<double(std::size_t, std::size_t)>& at,
                         const char* what) {
  std::vector<double> upper;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(at(i, j));
  const auto ranks = average_ranks(upper);
  const double centre = (static_cast<double>(upper.size()) + 1.0) / 2.0;
  RankMatrix r{n, std::vector<double>(n * n, 0.0), 0.0};
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const double v = ranks[k] - centre;
      r.m[i * n + j] = r.m[j * n + i] = v;
      r.norm2 += v * v;
    }
  if (r.norm2 == 0.0)
    throw DegenerateCorrelationError(std::string(what) + " has constant ranks; correlation undefined");
  return r;
}

// Tree positions are the sorted leaf labels; E holds their path lengths.
struct Problem {
  PreparedTree tree;
  RankMatrix e, d;
  std::vector<std::string> languages;

  Problem(const PhyloTree& t, const DistanceMatrix& dist)
      : tree(t),
        e(centred_ranks(tree.leaf_count(),
                        [&](std::size_t i, std::size_t j) { return static_cast<double>(tree.path_length(i, j)); },
                        "tree path matrix")),
        d(centred_ranks(dist.size(), [&](std::size_t i, std::size_t j) { return dist(i, j); },
                        "distance matrix")),
        languages(dist.labels()) {
    if (tree.leaf_count() != dist.size())
      throw LabelMismatchError("tree has " + std::to_string(tree.leaf_count()) + " leaves but the matrix has " +
                               std::to_string(dist.size()) + " labels");
  }

  std::size_t n() const { return languages.size(); }

  // sum over p<q of E(p,q) * D(sigma p, sigma q)
  double score(const std::vector<std::size_t>& sigma) const {
    double s = 0.0;
    for (std::size_t p = 0; p < n(); ++p)
      for (std::size_t q = p + 1; q < n(); ++q) s += e(p, q) * d(sigma[p], sigma[q]);
    return s;
  }

  double swap_delta(const std::vector<std::size_t>& sigma, std::size_t a, std::size_t b) const {
    double delta = 0.0;
    for (std::size_t q = 0; q < n(); ++q) {
      if (q == a || q == b) continue;
      delta += (e(a, q) - e(b, q)) * (d(sigma[b], sigma[q]) - d(sigma[a], sigma[q]));
    }
    return delta;
  }

  double correlation(double score) const {
    return std::clamp(score / std::sqrt(e.norm2 * d.norm2), -1.0, 1.0);
  }
};

struct Climb {
  std::vector<std::size_t> sigma;
  double score = 0.0;
  std::size_t accepted = 0;
};

Climb climb(const Problem& prob, std::size_t restart, const QapOptions& options) {
  const std::size_t n = prob.n();
  Rng rng(options.seed, restart);
  Climb c;
  c.sigma.resize(n);
  std::iota(c.sigma.begin(), c.sigma.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(c.sigma));
  c.score = prob.score(c.sigma);
  if (n < 2) return c;
  std::size_t stall = 0;
  while (stall < options.stall_limit) {
    const auto a = static_cast<std::size_t>(rng.below(n));
    auto b = static_cast<std::size_t>(rng.below(n - 1));
    if (b >= a) ++b;
    if (prob.swap_delta(c.sigma, a, b) > 0.0) {
      std::swap(c.sigma[a], c.sigma[b]);
      const double full = prob.score(c.sigma);
      if (full > c.score) {
        c.score = full;
        ++c.accepted;
        stall = 0;
        if (options.on_accept) options.on_accept(restart, prob.correlation(full));
        continue;
      }
      std::swap(c.sigma[a], c.sigma[b]);
    }
    ++stall;
  }
  return c;
}

}  // namespace

LabelingResult qap_flip_optimize(const PhyloTree& tree, const DistanceMatrix& d,
                                 const QapOptions& options) {
  if (options.restarts == 0 || options.stall_limit == 0)
    throw ConfigError("QAP restarts and stall_limit must be positive");
  const Problem prob(tree, d);
  std::vector<Climb> climbs(options.restarts);
  parallel_for(options.restarts, options.on_accept ? 1 : options.jobs,
               [&](std::size_t r) { climbs[r] = climb(prob, r, options); });

  std::size_t best = 0, accepted = 0;
  for (std::size_t r = 0; r < climbs.size(); ++r) {
    accepted += climbs[r].accepted;
    if (climbs[r].score > climbs[best].score) best = r;
  }
  LabelingResult result;
  result.positions = prob.tree.labels();
  for (std::size_t p : climbs[best].sigma) result.permutation.push_back(prob.languages[p]);
  result.correlation = prob.correlation(climbs[best].score);
  result.restarts = options.restarts;
  result.flips_accepted = accepted;
  return result;
}

namespace {

std::vector<std::size_t> labeling_indices(const Problem& prob, std::span<const std::string> labeling) {
  if (labeling.size() != prob.n()) throw LabelMismatchError("labeling has the wrong length");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < prob.n(); ++i) index.emplace(prob.languages[i], i);
  std::vector<std::size_t> sigma;
  std::vector<bool> seen(prob.n(), false);
  for (const auto& name : labeling) {
    auto it = index.find(name);
    if (it == index.end() || seen[it->second])
      throw LabelMismatchError("labeling is not a bijection onto the matrix labels ('" + name + "')");
    seen[it->second] = true;
    sigma.push_back(it->second);
  }
  return sigma;
}

}  // namespace

double labeling_correlation(const PhyloTree& tree, const DistanceMatrix& d,
                            std::span<const std::string> labeling) {
  const Problem prob(tree, d);
  return prob.correlation(prob.score(labeling_indices(prob, labeling)));
}

SignificanceReport labeling_permutation_test(const PhyloTree& tree, const LabelingResult& labeling,
                                             const DistanceMatrix& d, std::size_t n,
                                             std::uint64_t seed, int jobs) {
  if (n == 0) throw ConfigError("n_permutations must be positive");
  const Problem prob(tree, d);
  const double observed = prob.correlation(prob.score(labeling_indices(prob, labeling.permutation)));
  std::vector<double> samples(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    std::vector<std::size_t> sigma(prob.n());
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    Rng rng(seed, i);
    rng.shuffle(std::span<std::size_t>(sigma));
    samples[i] = prob.correlation(prob.score(sigma));
  });
  SignificanceReport report = summarize_permutations(observed, samples, true);
  report.seed = seed;
  report.metric_kind = "spearman";
  return report;
}

PhyloTree apply_labeling(const PhyloTree& tree, const LabelingResult& labeling) {
  std::unordered_map<std::string, std::string> rename;
  for (std::size_t i = 0; i < labeling.positions.size(); ++i)
    rename.emplace(labeling.positions[i], labeling.permutation.at(i));
  PhyloTree out = tree;
  for (int id : out.leaves()) {
    auto it = rename.find(out.node(id).label);
    if (it == rename.end()) throw LabelMismatchError("leaf '" + out.node(id).label + "' is not in the labeling");
    out.node(id).label = it->second;
  }
  return out;
}

}  // namespace embedshape
