#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "embedshape/common/error.hpp"
#include "embedshape/significance/significance.hpp"
#include "helpers.hpp"
#include "qap_bruteforce.hpp"
#include "tree_oracles.hpp"

using namespace embedshape;

namespace {

PhyloTree relabel(const PhyloTree& t, const std::map<std::string, std::string>& rename) {
  PhyloTree out = t;
  for (int id : out.leaves()) out.node(id).label = rename.at(out.node(id).label);
  return out;
}

std::vector<double> unit_paths(const PhyloTree& t) {
  const PreparedTree p(t);
  const std::size_t n = p.leaf_count();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) e[i * n + j] = static_cast<double>(p.path_length(i, j));
  return e;
}

// Languages x0.. placed on the tree's positions by a random bijection, with
// D equal to the unit path lengths between their positions.
DistanceMatrix planted(const PhyloTree& t, std::mt19937_64& rng) {
  const auto path = unit_paths(t);
  const std::size_t n = t.leaf_labels().size();
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::shuffle(sigma.begin(), sigma.end(), rng);
  std::vector<double> e(n * n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) e[sigma[p] * n + sigma[q]] = path[p * n + q];
  return DistanceMatrix(testing::numbered(n, "x"), e);
}

bool same_report(const SignificanceReport& a, const SignificanceReport& b) {
  return a.observed == b.observed && a.perm_mean == b.perm_mean && a.perm_std == b.perm_std &&
         a.z_score == b.z_score && a.z_defined == b.z_defined && a.n_strictly_better == b.n_strictly_better &&
         a.n_ties == b.n_ties && a.rank == b.rank && a.n_permutations == b.n_permutations &&
         a.rank_p_value == b.rank_p_value && a.seed == b.seed && a.metric_kind == b.metric_kind &&
         a.higher_is_better == b.higher_is_better;
}

}  // namespace

TEST_CASE("summarize_permutations for distances") {
  const std::vector<double> samples{1, 2, 3, 4, 2};
  const auto r = summarize_permutations(2.0, samples, false);
  CHECK(r.n_permutations == 5);
  CHECK(r.n_strictly_better == 1);
  CHECK(r.n_ties == 2);
  CHECK(r.rank == 3);
  CHECK(r.rank_p_value == doctest::Approx(0.2));
  CHECK(r.perm_mean == doctest::Approx(2.4));
  const double sd = std::sqrt((1.96 + 0.16 + 0.36 + 2.56 + 0.16) / 5.0);
  CHECK(r.perm_std == doctest::Approx(sd));
  CHECK(r.z_defined);
  CHECK(r.z_score == doctest::Approx(0.4 / sd));
}

TEST_CASE("summarize_permutations for correlations") {
  const std::vector<double> samples{0.1, 0.5, 0.9};
  const auto r = summarize_permutations(0.5, samples, true);
  CHECK(r.n_strictly_better == 1);
  CHECK(r.n_ties == 1);
  CHECK(r.z_score == doctest::Approx(0.0));
  CHECK(r.higher_is_better);
}

TEST_CASE("degenerate permutation spread") {
  const std::vector<double> one{3.0};
  const auto r = summarize_permutations(1.0, one, false);
  CHECK(r.perm_std == 0.0);
  CHECK(!r.z_defined);
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(!summarize_permutations(2.0, flat, false).z_defined);
}

TEST_CASE("identical trees are significant under leaf permutation") {
  std::mt19937_64 rng(5);
  const auto t = oracle::random_binary_tree(oracle::leaf_names(10), rng);
  for (TreeDistanceKind k : {TreeDistanceKind::Path, TreeDistanceKind::ClusterInfo,
                             TreeDistanceKind::MatchingSplit, TreeDistanceKind::JRF1}) {
    const auto r = leaf_permutation_test(t, t, k, 1000, 42);
    CHECK(r.observed == 0.0);
    CHECK(r.rank_p_value < 0.05);
    CHECK(static_cast<double>(r.rank) / 1000.0 < 0.05);
    CHECK(r.metric_kind == tree_distance_name(k));
    CHECK(!r.higher_is_better);
  }
}

TEST_CASE("leaf permutation test is reproducible and job-count independent") {
  std::mt19937_64 rng(6);
  const auto names = oracle::leaf_names(9);
  const auto t = oracle::random_binary_tree(names, rng), r = oracle::random_binary_tree(names, rng);
  const auto a = leaf_permutation_test(t, r, TreeDistanceKind::PhyloInfo, 300, 42, 1);
  const auto b = leaf_permutation_test(t, r, TreeDistanceKind::PhyloInfo, 300, 42, 4);
  CHECK(same_report(a, b));
  const auto c = leaf_permutation_test(t, r, TreeDistanceKind::PhyloInfo, 300, 43, 1);
  CHECK(c.seed == 43);
  CHECK(c.perm_mean != a.perm_mean);
}

TEST_CASE("leaf permutation test validates its inputs") {
  const auto a = parse_newick("((a,b),(c,d));");
  const auto b = parse_newick("((a,b),(c,e));");
  CHECK_THROWS_AS(leaf_permutation_test(a, b, TreeDistanceKind::JRF1, 10, 1), LabelMismatchError);
  CHECK_THROWS_AS(leaf_permutation_test(a, a, TreeDistanceKind::JRF1, 0, 1), ConfigError);
}

TEST_CASE("average ranks share ties") {
  const std::vector<double> v{3, 1, 3, 2};
  CHECK(average_ranks(v) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("spearman matrix correlation") {
  std::mt19937_64 rng(9);
  const auto d = testing::random_matrix(7, rng);
  CHECK(spearman_matrix_correlation(d, d) == doctest::Approx(1.0));

  std::vector<double> cubed = d.entries();
  for (double& x : cubed) x = x * x * x + 0.5 * x;
  for (std::size_t i = 0; i < 7; ++i) cubed[i * 7 + i] = 0.0;
  CHECK(spearman_matrix_correlation(d, DistanceMatrix(d.labels(), cubed)) == doctest::Approx(1.0));

  // Upper triangles [1..6] and [6..1] on four labels.
  const auto labels = testing::numbered(4);
  const DistanceMatrix up(labels, {0, 1, 2, 3, 1, 0, 4, 5, 2, 4, 0, 6, 3, 5, 6, 0});
  const DistanceMatrix down(labels, {0, 6, 5, 4, 6, 0, 3, 2, 5, 3, 0, 1, 4, 2, 1, 0});
  CHECK(spearman_matrix_correlation(up, down) == doctest::Approx(-1.0));

  const DistanceMatrix flat(labels, {0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 0});
  CHECK_THROWS_AS(spearman_matrix_correlation(up, flat), DegenerateCorrelationError);
  CHECK_THROWS_AS(spearman_matrix_correlation(up, testing::random_matrix(5, rng)), LabelMismatchError);

  const auto other = testing::random_matrix(7, rng);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = i + 1; j < 7; ++j) {
      x.push_back(d(i, j));
      y.push_back(other(i, j));
    }
  CHECK(spearman_matrix_correlation(d, other) == doctest::Approx(oracle::spearman(x, y)).epsilon(1e-12));
}

TEST_CASE("QAP recovers a planted labeling") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto t = oracle::random_binary_tree(oracle::leaf_names(6), rng);
    const auto d = planted(t, rng);
    QapOptions o;
    o.restarts = 20;
    o.seed = static_cast<std::uint64_t>(trial);
    const auto res = qap_flip_optimize(t, d, o);
    CHECK(res.correlation == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.restarts == 20);
    CHECK(labeling_correlation(t, d, res.permutation) == doctest::Approx(res.correlation));
    // The relabelled tree reproduces D's rank order.
    const auto labelled = apply_labeling(t, res);
    const auto path = unit_paths(labelled);
    const std::size_t n = 6;
    std::vector<double> e(path);
    CHECK(spearman_matrix_correlation(DistanceMatrix(testing::numbered(n, "x"), e), d) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("QAP matches exhaustive search on small instances") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    const auto t = oracle::random_binary_tree(oracle::leaf_names(5), rng);
    const auto d = testing::random_matrix(5, rng);
    QapOptions o;
    o.restarts = 200;
    o.seed = 7;
    const auto res = qap_flip_optimize(t, d, o);
    const double best = oracle::best_labeling_correlation(unit_paths(t), d.entries(), 5);
    CHECK(res.correlation == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("QAP climbs monotonically and is reproducible") {
  std::mt19937_64 rng(14);
  const auto t = oracle::random_binary_tree(oracle::leaf_names(10), rng);
  const auto d = testing::random_matrix(10, rng);
  std::map<std::size_t, std::vector<double>> trace;
  QapOptions o;
  o.restarts = 5;
  o.seed = 3;
  o.on_accept = [&](std::size_t restart, double c) { trace[restart].push_back(c); };
  const auto res = qap_flip_optimize(t, d, o);
  std::size_t total = 0;
  for (const auto& [restart, cs] : trace) {
    CHECK(std::is_sorted(cs.begin(), cs.end()));
    for (std::size_t i = 1; i < cs.size(); ++i) CHECK(cs[i] > cs[i - 1]);
    total += cs.size();
  }
  CHECK(total == res.flips_accepted);

  QapOptions quick;
  quick.restarts = 1;
  quick.stall_limit = 1;
  quick.seed = 99;
  const auto a = qap_flip_optimize(t, d, quick), b = qap_flip_optimize(t, d, quick);
  CHECK(a.permutation == b.permutation);
  CHECK(a.correlation == b.correlation);

  QapOptions parallel = o;
  parallel.on_accept = nullptr;
  parallel.jobs = 4;
  const auto p = qap_flip_optimize(t, d, parallel);
  CHECK(p.permutation == res.permutation);
  CHECK(p.correlation == res.correlation);
}

TEST_CASE("QAP input validation") {
  std::mt19937_64 rng(15);
  const auto t = oracle::random_binary_tree(oracle::leaf_names(5), rng);
  QapOptions o;
  CHECK_THROWS_AS(qap_flip_optimize(t, testing::random_matrix(6, rng), o), LabelMismatchError);
  o.restarts = 0;
  CHECK_THROWS_AS(qap_flip_optimize(t, testing::random_matrix(5, rng), o), ConfigError);
  const auto d = testing::random_matrix(5, rng);
  const std::vector<std::string> dup{"p0", "p0", "p1", "p2", "p3"};
  CHECK_THROWS_AS(labeling_correlation(t, d, dup), LabelMismatchError);
}

TEST_CASE("labeling permutation test") {
  std::mt19937_64 rng(16);
  const auto t = oracle::random_binary_tree(oracle::leaf_names(10), rng);
  const auto d = planted(t, rng);
  QapOptions o;
  o.restarts = 30;
  const auto best = qap_flip_optimize(t, d, o);
  const auto r = labeling_permutation_test(t, best, d, 1000, 42);
  CHECK(r.observed == doctest::Approx(1.0));
  CHECK(r.z_defined);
  CHECK(r.z_score > 3.0);
  CHECK(r.higher_is_better);
  CHECK(r.metric_kind == "spearman");
  CHECK(r.rank_p_value < 0.01);

  const auto a = labeling_permutation_test(t, best, d, 10, 5, 1);
  const auto b = labeling_permutation_test(t, best, d, 10, 5, 3);
  CHECK(same_report(a, b));
}

TEST_CASE("rank p-values and z-scores order cases consistently") {
  std::mt19937_64 rng(17);
  const auto names = oracle::leaf_names(12);
  std::vector<double> ps, zs;
  for (int c = 0; c < 24; ++c) {
    const auto r = oracle::random_binary_tree(names, rng);
    // More swaps make T progressively less similar to R.
    std::map<std::string, std::string> rename;
    auto perm = names;
    for (int s = 0; s < 2 + c / 3; ++s) {
      const auto i = rng() % names.size(), j = rng() % names.size();
      std::swap(perm[i], perm[j]);
    }
    for (std::size_t i = 0; i < names.size(); ++i) rename[names[i]] = perm[i];
    const auto rep = leaf_permutation_test(relabel(r, rename), r, TreeDistanceKind::ClusterInfo, 300,
                                           static_cast<std::uint64_t>(c));
    REQUIRE(rep.z_defined);
    ps.push_back(rep.rank_p_value);
    zs.push_back(-rep.z_score);
  }
  CHECK(oracle::spearman(ps, zs) > 0.95);
}

TEST_CASE("report JSON round trip") {
  std::mt19937_64 rng(18);
  const auto names = oracle::leaf_names(7);
  const auto t = oracle::random_binary_tree(names, rng), r = oracle::random_binary_tree(names, rng);
  auto rep = leaf_permutation_test(t, r, TreeDistanceKind::MatchingSplit, 50, 11);
  rep.metadata["language"] = "x";
  const auto j = report_to_json(rep);
  const auto back = report_from_json(j);
  CHECK(same_report(rep, back));
  CHECK(back.metadata == rep.metadata);
  CHECK(report_to_json(back).dump() == j.dump());
}
