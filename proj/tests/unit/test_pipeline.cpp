#include <cmath>
#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/pipeline/config.hpp"
#include "embedshape/pipeline/pipeline.hpp"
#include "embedshape/pipeline/plot_svg.hpp"
#include "embedshape/pipeline/summarize.hpp"
#include "embedshape/pipeline/synthetic.hpp"
#include "helpers.hpp"
#include "tree_oracles.hpp"

using namespace embedshape;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
  return json{{"languages", {{{"id", "a"}, {"path", "a.vec"}}, {{"id", "b"}, {"path", "sub/b.vec"}}}},
              {"reference_tree", "ref.nwk"}};
}

SignificanceReport report(double z, double p, std::size_t n, const std::string& kind) {
  SignificanceReport r;
  r.z_score = z;
  r.z_defined = true;
  r.rank_p_value = p;
  r.n_permutations = n;
  r.metric_kind = kind;
  r.metadata = {{"metric", "euclidean"}, {"degree", 1}, {"diagram_distance", "bottleneck"},
                {"tree_algorithm", "upgma"}};
  return r;
}

// Small single-combination grid over a fresh synthetic dataset.
RunConfig tiny_run(const fs::path& dir, std::size_t languages) {
  SyntheticSpec spec;
  spec.n_languages = languages;
  spec.tokens = 40;
  spec.dim = 4;
  spec.seed = 1;
  auto c = load_run_config(write_synthetic_dataset(dir, spec));
  c.metrics = {Metric::Euclidean};
  c.degrees = {0};
  c.diagram_distances = {DiagramMethod::Bottleneck};
  c.tree_algorithms = {TreeAlgorithm::Upgma};
  c.tree_metrics = {TreeDistanceKind::ClusterInfo};
  c.n_permutations = 20;
  c.plots = false;
  c.cache_dir = dir / "cache";
  c.output_dir = dir / "out";
  return c;
}

std::size_t computed(const nlohmann::ordered_json& manifest) {
  std::size_t total = 0;
  for (const auto& [stage, s] : manifest["timings"]["stages"].items()) total += s["computed"].get<std::size_t>();
  return total;
}

}  // namespace

TEST_CASE("config parsing resolves paths and applies defaults") {
  unsetenv("EMBEDSHAPE_CACHE");
  const auto c = parse_run_config(minimal_config(), "/base");
  REQUIRE(c.languages.size() == 2);
  CHECK(c.languages[1].embedding_path == fs::path("/base/sub/b.vec"));
  CHECK(c.reference_tree_path == fs::path("/base/ref.nwk"));
  CHECK(c.cache_dir == fs::path("/base/cache"));
  CHECK(c.degrees == std::vector<int>{0, 1, 2});
  CHECK(c.n_permutations == 100000);
  CHECK(c.planned_trees() == 2 * 3 * 4 * 2);
  CHECK(c.planned_reports() == 2 * 3 * 4 * 2 * 6);
  CHECK(c.effective_language_counts() == std::vector<std::size_t>{2});

  auto abs = minimal_config();
  abs["cache_dir"] = "/elsewhere";
  CHECK(parse_run_config(abs, "/base").cache_dir == fs::path("/elsewhere"));
}

TEST_CASE("config parsing rejects bad input") {
  auto doc = minimal_config();
  doc["colour"] = "blue";
  CHECK_THROWS_AS(parse_run_config(doc, "/"), ConfigError);
  doc = minimal_config();
  doc["degrees"] = {0, 3};
  CHECK_THROWS_AS(parse_run_config(doc, "/"), ConfigError);
  doc = minimal_config();
  doc["metrics"] = {"manhattan"};
  CHECK_THROWS_AS(parse_run_config(doc, "/"), ConfigError);
  doc = minimal_config();
  doc.erase("reference_tree");
  CHECK_THROWS_AS(parse_run_config(doc, "/"), ConfigError);
  doc = minimal_config();
  doc["language_counts"] = {3};
  CHECK_THROWS_AS(parse_run_config(doc, "/"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json::array(), "/"), ConfigError);
}

TEST_CASE("cache directory environment override") {
  setenv("EMBEDSHAPE_CACHE", "/tmp/override_cache", 1);
  const auto c = parse_run_config(minimal_config(), "/base");
  unsetenv("EMBEDSHAPE_CACHE");
  CHECK(c.cache_dir == fs::path("/tmp/override_cache"));
}

TEST_CASE("config hash ignores locations and job counts") {
  auto a = parse_run_config(minimal_config(), "/base");
  auto b = a;
  b.cache_dir = "/x";
  b.output_dir = "/y";
  b.jobs = 8;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("language subsets keep prefixes") {
  RunConfig c;
  for (const char* id : {"a", "b", "c", "d", "e"}) c.languages.push_back({id, id});
  const auto subs = subset_languages(c, {2});
  REQUIRE(subs.size() == 1);
  REQUIRE(subs[0].languages.size() == 2);
  CHECK(subs[0].languages[0].id == "a");
  CHECK(subs[0].languages[1].id == "b");
  CHECK(subset_languages(c, {5, 3}).at(1).languages.size() == 3);
  CHECK_THROWS_AS(subset_languages(c, {6}), ConfigError);
}

TEST_CASE("reference restriction") {
  const auto ref = parse_newick("((a,b),(c,(d,e)));");
  const auto r = restrict_reference(ref, {"a", "c", "d"});
  auto labels = r.leaf_labels();
  std::sort(labels.begin(), labels.end());
  CHECK(labels == std::vector<std::string>{"a", "c", "d"});
  CHECK(oracle::nontrivial_splits(r).empty());
  CHECK_THROWS_AS(restrict_reference(ref, {"a", "z"}), LabelMismatchError);

  // A flat 30-leaf reference pruned to 10 keeps exactly the induced splits.
  const auto names = oracle::leaf_names(30);
  std::string text = "((";
  for (std::size_t i = 0; i < 30; ++i) text += names[i] + (i == 14 ? "),(" : i == 29 ? "));" : ",");
  const auto flat = parse_newick(text);
  const std::vector<std::string> keep{names[0], names[3], names[7], names[11], names[14],
                                      names[15], names[20], names[22], names[26], names[29]};
  const auto pruned = restrict_reference(flat, keep);
  const auto splits = oracle::nontrivial_splits(pruned);
  REQUIRE(splits.size() == 1);
  CHECK(splits[0].a == oracle::LabelSet(keep.begin(), keep.begin() + 5));
}

TEST_CASE("diagram plots") {
  std::vector<PersistenceDiagram> empty(2);
  for (int k = 0; k < 2; ++k) empty[static_cast<std::size_t>(k)].degree = k;
  const auto blank = render_diagram_svg(empty, "none");
  CHECK(blank.rfind("<svg", 0) == 0);
  CHECK(blank.find("<line") != std::string::npos);
  CHECK(blank.find("<circle") == std::string::npos);

  auto one = empty;
  one[0].bars.push_back({0.0, 1.5});
  const auto svg = render_diagram_svg(one, "one");
  std::size_t markers = 0;
  for (std::size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++markers;
  CHECK(markers == 1);
  CHECK(render_diagram_svg(one, "one") == svg);

  const auto dir = testing::scratch_dir("plots");
  plot_diagram(one, dir / "p.svg", "one");
  CHECK(read_file(dir / "p.svg") == svg);
  // A regular file where a directory is needed.
  CHECK_THROWS_AS(plot_diagram(one, dir / "p.svg" / "q.svg", "x"), IoError);
}

TEST_CASE("summary tables") {
  std::vector<SignificanceReport> reports{report(2.5, 0.001, 1000, "jrf1"), report(0.5, 0.3, 1000, "jrf1"),
                                          report(4.0, 0.0, 1000, "cluster_info")};
  const auto s = summarize_reports(reports);
  const auto& z = s.json["z_thresholds"];
  CHECK(z[0]["all"]["count"] == 2);  // z > 1
  CHECK(z[1]["all"]["count"] == 2);  // z > 2
  CHECK(z[1]["jrf1"]["count"] == 1);
  CHECK(z[2]["all"]["count"] == 1);  // z > 3
  CHECK(z[3]["cluster_info"]["count"] == 0);

  // p = 0 is floored at 1/n = 0.001.
  CHECK(floored_p_value(reports[2]) == 0.001);
  const auto& p = s.json["p_thresholds"];
  CHECK(p[4]["p_at_most"] == 0.001);
  CHECK(p[4]["all"]["count"] == 2);
  CHECK(p[5]["all"]["count"] == 0);

  const auto& block = s.json["mean_z"]["tree_algorithm"];
  REQUIRE(block.size() == 1);
  CHECK(block[0]["mean"].get<double>() == doctest::Approx(7.0 / 3.0));
  CHECK(block[0]["jrf1"].get<double>() == doctest::Approx(1.5));

  CHECK(s.json["max_z"]["z"] == 4.0);
  CHECK(s.json["max_z"]["bonferroni_p"].get<double>() == doctest::Approx(3.0 * 0.5 * std::erfc(4.0 / std::sqrt(2.0))));
  CHECK(s.markdown.find("## Reports beyond z thresholds") != std::string::npos);

  CHECK(bonferroni_p(0.0, 1) == doctest::Approx(0.5));
  CHECK(bonferroni_p(0.0, 10) == 1.0);
  CHECK_THROWS_AS(summarize_reports(std::vector<SignificanceReport>{}), EmptyInputError);
}

TEST_CASE("synthetic languages are reproducible") {
  SyntheticSpec spec;
  spec.n_languages = 4;
  spec.tokens = 30;
  spec.seed = 5;
  const auto a = synthesize_languages(spec), b = synthesize_languages(spec);
  REQUIRE(a.size() == 4);
  CHECK(a[0].vectors == b[0].vectors);
  CHECK(a[0].size() == 30);
  CHECK(synthetic_group(spec, 0) == 0);
  CHECK(synthetic_group(spec, 3) == 1);
}

TEST_CASE("a one-combination grid produces one report and caches everything") {
  const auto dir = testing::scratch_dir("pipeline_tiny");
  const auto c = tiny_run(dir, 5);
  CHECK(c.planned_reports() == 1);
  const auto first = run_pipeline(c);
  CHECK(first["reports"].size() == 1);
  CHECK(first["failures"].empty());
  CHECK(computed(first) > 0);
  CHECK(fs::exists(dir / "out" / "n5" / "reference.nwk"));
  CHECK(fs::exists(dir / "out" / "manifest.json"));

  const auto second = run_pipeline(c);
  CHECK(computed(second) == 0);
  CHECK(second["artifacts"] == first["artifacts"]);

  const auto loaded = load_reports(dir / "out" / "manifest.json");
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].metric_kind == "cluster_info");
  CHECK(loaded[0].n_permutations == 20);

  auto staged = c;
  staged.output_dir = dir / "staged";
  const auto trees_only = run_pipeline(staged, Stage::Trees);
  CHECK(trees_only["reports"].empty());
  CHECK(computed(trees_only) == 0);
}

TEST_CASE("failures are recorded without aborting the run") {
  const auto dir = testing::scratch_dir("pipeline_failures");
  auto c = tiny_run(dir, 5);
  c.metrics = {Metric::Euclidean, Metric::Cosine};
  // A zero vector makes cosine distances undefined for this language.
  std::ofstream(c.languages[1].embedding_path) << "2 4\nzero 0 0 0 0\none 1 0 0 0\n";
  const auto m = run_pipeline(c);
  CHECK(m["reports"].size() == 1);
  CHECK(m["failures"].size() == 1);
  CHECK(m["reports"].size() + m["failures"].size() == c.planned_reports());
  REQUIRE(m["language_failures"].size() == 1);
  CHECK(m["language_failures"][0]["error"] == "DegenerateInputError");
}
