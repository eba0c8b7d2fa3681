#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "embedshape/embedshape.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("embedshape_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

es_matrix* make_matrix(std::vector<const char*> labels, std::vector<double> entries) {
  es_matrix* m = nullptr;
  REQUIRE(es_matrix_create(labels.size(), labels.data(), entries.data(), &m) == ES_OK);
  return m;
}

es_tree* parse(const char* newick) {
  es_tree* t = nullptr;
  REQUIRE(es_tree_parse(newick, &t) == ES_OK);
  return t;
}

std::string take(char* s) {
  std::string out(s);
  es_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(es_version()) > 0);
  CHECK(std::string(es_status_name(ES_OK)) == "ok");
  CHECK(std::string(es_status_name(ES_ERR_LABEL_MISMATCH)) != "ok");
}

TEST_CASE("null arguments are rejected") {
  es_matrix* m = nullptr;
  CHECK(es_matrix_create(2, nullptr, nullptr, &m) == ES_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::strlen(es_last_error()) > 0);
  CHECK(es_tree_parse(nullptr, nullptr) == ES_ERR_INVALID_ARGUMENT);
  double x = 0;
  CHECK(es_tree_distance(nullptr, nullptr, "jrf1", &x) == ES_ERR_INVALID_ARGUMENT);
  es_matrix_free(nullptr);
  es_tree_free(nullptr);
  es_diagrams_free(nullptr);
  es_labeling_free(nullptr);
  es_embedding_free(nullptr);
}

TEST_CASE("errors map to status codes with messages") {
  es_matrix* m = nullptr;
  const char* labels[] = {"a", "b"};
  const double asym[] = {0, 1, 2, 0};
  CHECK(es_matrix_create(2, labels, asym, &m) == ES_ERR_INVALID_MATRIX);
  CHECK(std::string(es_last_error()).size() > 0);

  es_tree* t = nullptr;
  CHECK(es_tree_parse("((a,b);", &t) == ES_ERR_PARSE);
  CHECK(es_matrix_load("/nonexistent/m.csv", &m) == ES_ERR_IO);

  es_matrix* one = make_matrix({"a"}, {0});
  CHECK(es_tree_build(one, "upgma", &t) == ES_ERR_INSUFFICIENT_LEAVES);
  CHECK(es_tree_build(one, "ml", &t) == ES_ERR_CONFIG);
  es_matrix_free(one);

  es_tree* x = parse("((a,b),(c,d));");
  es_tree* y = parse("((a,b),(c,e));");
  double d = 0;
  CHECK(es_tree_distance(x, y, "jrf1", &d) == ES_ERR_LABEL_MISMATCH);
  es_tree_free(x);
  es_tree_free(y);
}

TEST_CASE("matrix round trip") {
  const auto dir = fresh_dir("matrix");
  es_matrix* m = make_matrix({"a", "b", "c"}, {0, 1, 2, 1, 0, 3, 2, 3, 0});
  CHECK(es_matrix_size(m) == 3);
  CHECK(es_matrix_get(m, 1, 2) == 3.0);
  CHECK(std::string(es_matrix_label(m, 2)) == "c");
  for (const char* name : {"m.bin", "m.csv"}) {
    const auto path = (dir / name).string();
    REQUIRE(es_matrix_save(m, path.c_str()) == ES_OK);
    es_matrix* back = nullptr;
    REQUIRE(es_matrix_load(path.c_str(), &back) == ES_OK);
    CHECK(es_matrix_get(back, 0, 2) == 2.0);
    es_matrix_free(back);
  }
  es_matrix_free(m);
}

TEST_CASE("embedding to diagrams to distances") {
  const auto dir = fresh_dir("embedding");
  std::ofstream(dir / "e.vec") << "4 2\na 0 0\nb 1 0\nc 1 1\nd 0 1\n";
  es_embedding* e = nullptr;
  REQUIRE(es_embedding_load((dir / "e.vec").c_str(), 10, &e) == ES_OK);
  CHECK(es_embedding_size(e) == 4);
  CHECK(es_embedding_dim(e) == 2);
  CHECK(std::string(es_embedding_token(e, 2)) == "c");
  es_matrix* m = nullptr;
  REQUIRE(es_embedding_distances(e, "euclidean", 1, &m) == ES_OK);
  es_embedding_free(e);

  es_diagrams* dg = nullptr;
  REQUIRE(es_diagrams_compute(m, 1, 0.0, &dg) == ES_OK);
  CHECK(es_diagrams_max_degree(dg) == 1);
  REQUIRE(es_diagrams_count(dg, 1) == 1);
  double birth = 0, death = 0;
  REQUIRE(es_diagrams_bar(dg, 1, 0, &birth, &death) == ES_OK);
  CHECK(birth == 1.0);
  CHECK(std::abs(death - std::sqrt(2.0)) <= 1e-12);
  CHECK(es_diagrams_bar(dg, 1, 5, &birth, &death) == ES_ERR_INVALID_ARGUMENT);

  const auto csv = (dir / "d.csv").string();
  REQUIRE(es_diagrams_save_csv(dg, csv.c_str()) == ES_OK);
  es_diagrams* back = nullptr;
  REQUIRE(es_diagrams_load_csv(csv.c_str(), &back) == ES_OK);
  double dist = -1;
  REQUIRE(es_diagram_distance(dg, back, 1, "bottleneck", nullptr, &dist) == ES_OK);
  CHECK(dist == 0.0);
  REQUIRE(es_plot_diagrams(dg, "square", (dir / "d.svg").c_str()) == ES_OK);
  CHECK(fs::exists(dir / "d.svg"));
  es_diagrams_free(back);
  es_diagrams_free(dg);
  es_matrix_free(m);
}

TEST_CASE("diagram distances and language matrices") {
  const double b1[] = {1}, d1[] = {3}, b2[] = {1}, d2[] = {5};
  es_diagrams *a = nullptr, *b = nullptr;
  REQUIRE(es_diagrams_create(1, 1, b1, d1, &a) == ES_OK);
  REQUIRE(es_diagrams_create(1, 1, b2, d2, &b) == ES_OK);
  CHECK(es_diagrams_count(a, 0) == 0);
  double x = 0;
  REQUIRE(es_diagram_distance(a, b, 1, "bottleneck", nullptr, &x) == ES_OK);
  CHECK(x == 2.0);
  CHECK(es_diagram_distance(a, b, 1, "nearest", nullptr, &x) == ES_ERR_CONFIG);

  es_compare_options o;
  REQUIRE(es_compare_options_default("cosine", 1, &o) == ES_OK);
  CHECK(o.range_max == 1.0);
  CHECK(o.sigma == doctest::Approx(0.1));
  REQUIRE(es_compare_options_default("euclidean", 1, &o) == ES_OK);
  REQUIRE(es_diagram_distance(a, b, 1, "persistence_image", &o, &x) == ES_OK);
  CHECK(x > 0.0);

  const char* langs[] = {"x", "y"};
  const es_diagrams* ds[] = {a, b};
  es_matrix* m = nullptr;
  REQUIRE(es_language_matrix(2, langs, ds, 1, "bottleneck", nullptr, 1, &m) == ES_OK);
  CHECK(es_matrix_get(m, 0, 1) == 2.0);
  es_matrix_free(m);
  es_diagrams_free(a);
  es_diagrams_free(b);
}

TEST_CASE("trees, tests and labelings") {
  es_matrix* m = make_matrix({"a", "b", "c"}, {0, 2, 8, 2, 0, 8, 8, 8, 0});
  es_tree* t = nullptr;
  REQUIRE(es_tree_build(m, "upgma", &t) == ES_OK);
  CHECK(es_tree_leaf_count(t) == 3);
  char* text = nullptr;
  REQUIRE(es_tree_newick(t, &text) == ES_OK);
  CHECK(take(text) == "((a:1.0,b:1.0):3.0,c:4.0);");
  es_tree_free(t);
  es_matrix_free(m);

  es_tree* big = parse("(((a,b),(c,d)),((e,f),(g,h)));");
  const char* keep[] = {"a", "b", "e"};
  es_tree* small = nullptr;
  REQUIRE(es_tree_restrict(big, 3, keep, &small) == ES_OK);
  CHECK(es_tree_leaf_count(small) == 3);
  es_tree_free(small);

  double d = -1;
  REQUIRE(es_tree_distance(big, big, "cluster_info", &d) == ES_OK);
  CHECK(d == 0.0);

  es_report r;
  REQUIRE(es_permutation_test(big, big, "cluster_info", 200, 42, 2, &r) == ES_OK);
  CHECK(r.observed == 0.0);
  CHECK(r.n_permutations == 200);
  CHECK(r.seed == 42);
  CHECK(std::string(r.metric_kind) == "cluster_info");
  CHECK(r.rank_p_value < 0.05);

  // Path lengths of the tree itself make a planted instance.
  es_matrix* planted = make_matrix({"a", "b", "c", "d", "e", "f", "g", "h"},
                                   {0, 2, 4, 4, 6, 6, 6, 6, 2, 0, 4, 4, 6, 6, 6, 6, 4, 4, 0, 2, 6, 6, 6, 6,
                                    4, 4, 2, 0, 6, 6, 6, 6, 6, 6, 6, 6, 0, 2, 4, 4, 6, 6, 6, 6, 2, 0, 4, 4,
                                    6, 6, 6, 6, 4, 4, 0, 2, 6, 6, 6, 6, 4, 4, 2, 0});
  es_labeling* l = nullptr;
  REQUIRE(es_qap_optimize(big, planted, 20, 500, 1, 1, &l) == ES_OK);
  CHECK(es_labeling_correlation(l) == doctest::Approx(1.0));
  CHECK(es_labeling_size(l) == 8);
  CHECK(std::string(es_labeling_position(l, 0)) == "a");
  REQUIRE(es_labeling_test(big, l, planted, 100, 3, 1, &r) == ES_OK);
  CHECK(r.observed == doctest::Approx(1.0));
  CHECK(std::string(r.metric_kind) == "spearman");
  double rho = 0;
  REQUIRE(es_spearman(planted, planted, &rho) == ES_OK);
  CHECK(rho == doctest::Approx(1.0));
  es_labeling_free(l);
  es_matrix_free(planted);
  es_tree_free(big);
}

TEST_CASE("synthetic dataset through the pipeline and summary") {
  const auto dir = fresh_dir("pipeline");
  es_synth_options so;
  es_synth_options_default(&so);
  so.n_languages = 4;
  so.tokens = 40;
  so.dim = 4;
  char* config = nullptr;
  REQUIRE(es_synthesize(dir.c_str(), &so, &config) == ES_OK);
  const std::string config_path = take(config);
  CHECK(fs::exists(config_path));

  es_run_options ro{};
  ro.stage = "trees";
  const std::string cache = (dir / "cache").string();
  ro.cache_dir = cache.c_str();
  char* manifest = nullptr;
  REQUIRE(es_pipeline_run(config_path.c_str(), &ro, &manifest) == ES_OK);
  CHECK(take(manifest).find("\"stage\": \"trees\"") != std::string::npos);

  ro.stage = "fly";
  CHECK(es_pipeline_run(config_path.c_str(), &ro, &manifest) == ES_ERR_CONFIG);

  char* summary = nullptr;
  CHECK(es_summarize((dir / "nothing").c_str(), nullptr, &summary) != ES_OK);
}
