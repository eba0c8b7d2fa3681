#include "embedshape/embedshape.h"

#include <cstring>
#include <new>
#include <sstream>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/embedding/embedding.hpp"
#include "embedshape/pdcompare/diagram_distance.hpp"
#include "embedshape/ph/vietoris_rips.hpp"
#include "embedshape/phylo/phylo_tree.hpp"
#include "embedshape/pipeline/config.hpp"
#include "embedshape/pipeline/pipeline.hpp"
#include "embedshape/pipeline/plot_svg.hpp"
#include "embedshape/pipeline/summarize.hpp"
#include "embedshape/pipeline/synthetic.hpp"
#include "embedshape/significance/significance.hpp"
#include "embedshape/treedist/tree_distance.hpp"

namespace es = embedshape;

struct es_embedding {
  es::EmbeddingSet value;
};
struct es_matrix {
  es::DistanceMatrix value;
};
struct es_diagrams {
  std::vector<es::PersistenceDiagram> value;
};
struct es_tree {
  es::PhyloTree value;
};
struct es_labeling {
  es::LabelingResult value;
};

namespace {

thread_local std::string g_last_error;

es_status fail(es_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
es_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return ES_OK;
  } catch (const es::Error& e) {
    return fail(static_cast<es_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ES_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ES_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ES_ERR_INTERNAL, "unknown error");
  }
}

#define ES_REQUIRE(cond)                                                  \
  do {                                                                    \
    if (!(cond)) return fail(ES_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

es::CompareConfig compare_config(const es_compare_options* o) {
  es::CompareConfig c;
  if (o) {
    c.sw_slices = o->sw_slices;
    c.image = es::ImageConfig{o->grid_rows, o->grid_cols, o->range_min, o->range_max, o->sigma};
  }
  return c;
}

const es::PersistenceDiagram& diagram_of(const es_diagrams* d, int degree) {
  if (degree < 0 || static_cast<std::size_t>(degree) >= d->value.size())
    throw es::DegreeMismatchError("no diagram of degree " + std::to_string(degree));
  return d->value[static_cast<std::size_t>(degree)];
}

void fill_report(const es::SignificanceReport& r, es_report* out) {
  *out = es_report{};
  out->observed = r.observed;
  out->perm_mean = r.perm_mean;
  out->perm_std = r.perm_std;
  out->z_score = r.z_score;
  out->z_defined = r.z_defined ? 1 : 0;
  out->rank = r.rank;
  out->n_strictly_better = r.n_strictly_better;
  out->n_ties = r.n_ties;
  out->n_permutations = r.n_permutations;
  out->rank_p_value = r.rank_p_value;
  out->seed = r.seed;
  std::strncpy(out->metric_kind, r.metric_kind.c_str(), sizeof out->metric_kind - 1);
}

}  // namespace

extern "C" {

const char* es_version(void) { return EMBEDSHAPE_VERSION; }

const char* es_status_name(es_status status) {
  switch (status) {
    case ES_OK: return "ok";
    case ES_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ES_ERR_INTERNAL: return "internal";
    default:
      if (status >= ES_ERR_PARSE && status <= ES_ERR_IO) return es::error_code_name(static_cast<es::ErrorCode>(status));
      return "unknown";
  }
}

const char* es_last_error(void) { return g_last_error.c_str(); }

void es_string_free(char* s) { std::free(s); }

es_status es_embedding_load(const char* path, size_t max_tokens, es_embedding** out) {
  ES_REQUIRE(path && out && max_tokens > 0);
  return guarded([&] { *out = new es_embedding{es::load_embedding(path, max_tokens)}; });
}

size_t es_embedding_size(const es_embedding* e) { return e ? e->value.size() : 0; }
size_t es_embedding_dim(const es_embedding* e) { return e ? e->value.dim : 0; }
const char* es_embedding_token(const es_embedding* e, size_t i) {
  return e && i < e->value.size() ? e->value.tokens[i].c_str() : nullptr;
}

es_status es_embedding_distances(const es_embedding* e, const char* metric, int jobs, es_matrix** out) {
  ES_REQUIRE(e && metric && out);
  return guarded([&] { *out = new es_matrix{es::pairwise_distances(e->value, es::parse_metric(metric), jobs)}; });
}

void es_embedding_free(es_embedding* e) { delete e; }

es_status es_matrix_create(size_t n, const char* const* labels, const double* entries, es_matrix** out) {
  ES_REQUIRE(out && (n == 0 || (labels && entries)));
  return guarded([&] {
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) {
      if (!labels[i]) throw es::InvalidMatrixError("null label");
      names.emplace_back(labels[i]);
    }
    *out = new es_matrix{es::DistanceMatrix(std::move(names), std::vector<double>(entries, entries + n * n))};
  });
}

es_status es_matrix_load(const char* path, es_matrix** out) {
  ES_REQUIRE(path && out);
  return guarded([&] { *out = new es_matrix{es::load_matrix(path)}; });
}

es_status es_matrix_save(const es_matrix* m, const char* path) {
  ES_REQUIRE(m && path);
  return guarded([&] { es::save_matrix(path, m->value); });
}

size_t es_matrix_size(const es_matrix* m) { return m ? m->value.size() : 0; }

double es_matrix_get(const es_matrix* m, size_t i, size_t j) {
  if (!m || i >= m->value.size() || j >= m->value.size()) return 0.0;
  return m->value(i, j);
}

const char* es_matrix_label(const es_matrix* m, size_t i) {
  return m && i < m->value.size() ? m->value.label(i).c_str() : nullptr;
}

void es_matrix_free(es_matrix* m) { delete m; }

es_status es_diagrams_compute(const es_matrix* m, int max_degree, double threshold, es_diagrams** out) {
  ES_REQUIRE(m && out);
  return guarded([&] {
    es::VrOptions options;
    options.max_degree = max_degree;
    if (threshold > 0.0) options.threshold = threshold;
    *out = new es_diagrams{es::vr_persistence(m->value, options)};
  });
}

es_status es_diagrams_create(int degree, size_t n_bars, const double* births, const double* deaths,
                             es_diagrams** out) {
  ES_REQUIRE(out && degree >= 0 && (n_bars == 0 || (births && deaths)));
  return guarded([&] {
    std::vector<es::PersistenceDiagram> v;
    for (int k = 0; k <= degree; ++k) v.push_back({k, {}});
    for (size_t i = 0; i < n_bars; ++i) {
      if (!(deaths[i] >= births[i])) throw es::ParseError("bar " + std::to_string(i) + " dies before it is born");
      v.back().bars.push_back({births[i], deaths[i]});
    }
    v.back().normalize();
    *out = new es_diagrams{std::move(v)};
  });
}

es_status es_diagrams_load_csv(const char* path, es_diagrams** out) {
  ES_REQUIRE(path && out);
  return guarded([&] {
    std::istringstream in(es::read_file(path));
    *out = new es_diagrams{es::read_diagrams_csv(in)};
  });
}

es_status es_diagrams_save_csv(const es_diagrams* d, const char* path) {
  ES_REQUIRE(d && path);
  return guarded([&] {
    std::ostringstream out;
    es::write_diagrams_csv(out, d->value);
    es::write_file_atomic(path, out.str());
  });
}

int es_diagrams_max_degree(const es_diagrams* d) { return d ? static_cast<int>(d->value.size()) - 1 : -1; }

size_t es_diagrams_count(const es_diagrams* d, int degree) {
  if (!d || degree < 0 || static_cast<size_t>(degree) >= d->value.size()) return 0;
  return d->value[static_cast<size_t>(degree)].size();
}

es_status es_diagrams_bar(const es_diagrams* d, int degree, size_t i, double* birth, double* death) {
  ES_REQUIRE(d && birth && death);
  ES_REQUIRE(degree >= 0 && static_cast<size_t>(degree) < d->value.size());
  ES_REQUIRE(i < d->value[static_cast<size_t>(degree)].size());
  const auto& bar = d->value[static_cast<size_t>(degree)].bars[i];
  *birth = bar.birth;
  *death = bar.death;
  return ES_OK;
}

es_status es_plot_diagrams(const es_diagrams* d, const char* title, const char* svg_path) {
  ES_REQUIRE(d && svg_path);
  return guarded([&] { es::plot_diagram(d->value, svg_path, title ? title : ""); });
}

void es_diagrams_free(es_diagrams* d) { delete d; }

es_status es_compare_options_default(const char* metric, int degree, es_compare_options* out) {
  ES_REQUIRE(metric && out);
  return guarded([&] {
    const es::ImageConfig c = es::default_image_config(es::parse_metric(metric), degree);
    *out = es_compare_options{es::kDefaultSlices, c.rows, c.cols, c.range_min, c.range_max, c.sigma};
  });
}

es_status es_diagram_distance(const es_diagrams* a, const es_diagrams* b, int degree, const char* method,
                              const es_compare_options* options, double* out) {
  ES_REQUIRE(a && b && method && out);
  return guarded([&] {
    const auto& da = diagram_of(a, degree);
    const auto& db = diagram_of(b, degree);
    es::CompareConfig c = compare_config(options);
    if (!options) c.image = es::default_image_config(es::Metric::Euclidean, degree);
    switch (es::parse_diagram_method(method)) {
      case es::DiagramMethod::Bottleneck: *out = es::bottleneck_distance(da, db); break;
      case es::DiagramMethod::SlicedWasserstein: *out = es::sliced_wasserstein_distance(da, db, c.sw_slices); break;
      case es::DiagramMethod::PersistenceImage:
        *out = es::image_distance(es::persistence_image(da, c.image), es::persistence_image(db, c.image));
        break;
      case es::DiagramMethod::BarStatistics:
        *out = es::bar_stats_distance(es::bar_statistics(da), es::bar_statistics(db));
        break;
    }
  });
}

es_status es_language_matrix(size_t n, const char* const* languages, const es_diagrams* const* diagrams, int degree,
                             const char* method, const es_compare_options* options, int jobs, es_matrix** out) {
  ES_REQUIRE(out && method && (n == 0 || (languages && diagrams)));
  return guarded([&] {
    std::vector<std::string> names;
    std::vector<es::PersistenceDiagram> per_language;
    for (size_t i = 0; i < n; ++i) {
      if (!languages[i] || !diagrams[i]) throw es::ConfigError("null language or diagram");
      names.emplace_back(languages[i]);
      per_language.push_back(diagram_of(diagrams[i], degree));
    }
    es::CompareConfig c = compare_config(options);
    if (!options) c.image = es::default_image_config(es::Metric::Euclidean, degree);
    *out = new es_matrix{es::language_distance_matrix(names, per_language, es::parse_diagram_method(method), c, jobs)};
  });
}

es_status es_tree_build(const es_matrix* m, const char* algorithm, es_tree** out) {
  ES_REQUIRE(m && algorithm && out);
  return guarded([&] { *out = new es_tree{es::build_tree(m->value, es::parse_tree_algorithm(algorithm))}; });
}

es_status es_tree_parse(const char* newick, es_tree** out) {
  ES_REQUIRE(newick && out);
  return guarded([&] { *out = new es_tree{es::parse_newick(newick)}; });
}

es_status es_tree_load(const char* path, es_tree** out) {
  ES_REQUIRE(path && out);
  return guarded([&] { *out = new es_tree{es::read_newick_file(path)}; });
}

es_status es_tree_newick(const es_tree* t, char** out) {
  ES_REQUIRE(t && out);
  return guarded([&] { *out = copy_string(es::write_newick(t->value)); });
}

size_t es_tree_leaf_count(const es_tree* t) { return t ? t->value.leaves().size() : 0; }

es_status es_tree_restrict(const es_tree* t, size_t n, const char* const* labels, es_tree** out) {
  ES_REQUIRE(t && out && (n == 0 || labels));
  return guarded([&] {
    std::vector<std::string> keep;
    for (size_t i = 0; i < n; ++i) keep.emplace_back(labels[i] ? labels[i] : "");
    *out = new es_tree{es::restrict_reference(t->value, keep)};
  });
}

es_status es_tree_distance(const es_tree* a, const es_tree* b, const char* kind, double* out) {
  ES_REQUIRE(a && b && kind && out);
  return guarded([&] { *out = es::tree_distance(a->value, b->value, es::parse_tree_distance(kind)); });
}

void es_tree_free(es_tree* t) { delete t; }

es_status es_permutation_test(const es_tree* t, const es_tree* reference, const char* kind, size_t n, uint64_t seed,
                              int jobs, es_report* out) {
  ES_REQUIRE(t && reference && kind && out && n > 0);
  return guarded([&] {
    fill_report(es::leaf_permutation_test(t->value, reference->value, es::parse_tree_distance(kind), n, seed, jobs),
                out);
  });
}

es_status es_spearman(const es_matrix* e, const es_matrix* d, double* out) {
  ES_REQUIRE(e && d && out);
  return guarded([&] { *out = es::spearman_matrix_correlation(e->value, d->value); });
}

es_status es_qap_optimize(const es_tree* t, const es_matrix* d, size_t restarts, size_t stall_limit, uint64_t seed,
                          int jobs, es_labeling** out) {
  ES_REQUIRE(t && d && out);
  return guarded([&] {
    es::QapOptions options;
    options.restarts = restarts;
    options.stall_limit = stall_limit;
    options.seed = seed;
    options.jobs = jobs;
    *out = new es_labeling{es::qap_flip_optimize(t->value, d->value, options)};
  });
}

double es_labeling_correlation(const es_labeling* l) { return l ? l->value.correlation : 0.0; }
size_t es_labeling_size(const es_labeling* l) { return l ? l->value.positions.size() : 0; }
const char* es_labeling_position(const es_labeling* l, size_t i) {
  return l && i < l->value.positions.size() ? l->value.positions[i].c_str() : nullptr;
}
const char* es_labeling_language(const es_labeling* l, size_t i) {
  return l && i < l->value.permutation.size() ? l->value.permutation[i].c_str() : nullptr;
}

es_status es_labeling_test(const es_tree* t, const es_labeling* l, const es_matrix* d, size_t n, uint64_t seed,
                           int jobs, es_report* out) {
  ES_REQUIRE(t && l && d && out && n > 0);
  return guarded([&] { fill_report(es::labeling_permutation_test(t->value, l->value, d->value, n, seed, jobs), out); });
}

void es_labeling_free(es_labeling* l) { delete l; }

es_status es_pipeline_run(const char* config_path, const es_run_options* options, char** manifest_json) {
  ES_REQUIRE(config_path);
  return guarded([&] {
    es::RunConfig config = es::load_run_config(config_path);
    es::Stage stage = es::Stage::All;
    if (options) {
      if (options->has_seed) config.seed = options->seed;
      if (options->cache_dir && *options->cache_dir) config.cache_dir = options->cache_dir;
      if (options->jobs > 0) config.jobs = options->jobs;
      if (options->stage) {
        const std::string name = options->stage;
        bool found = false;
        for (auto s : {es::Stage::Ingest, es::Stage::Diagrams, es::Stage::LanguageDistances, es::Stage::Trees,
                       es::Stage::Evaluate, es::Stage::Qap, es::Stage::All}) {
          if (name == es::stage_name(s)) {
            stage = s;
            found = true;
          }
        }
        if (!found) throw es::ConfigError("unknown stage '" + name + "'");
      }
    }
    const auto manifest = es::run_pipeline(config, stage);
    if (manifest_json) *manifest_json = copy_string(manifest.dump(2));
  });
}

es_status es_summarize(const char* source, const char* out_dir, char** summary_json) {
  ES_REQUIRE(source);
  return guarded([&] {
    const auto reports = es::load_reports(source);
    const auto summary = es::summarize_reports(reports);
    const std::string text = summary.json.dump(2) + "\n";
    if (out_dir) {
      es::write_file_atomic(std::filesystem::path(out_dir) / "summary.json", text);
      es::write_file_atomic(std::filesystem::path(out_dir) / "summary.md", summary.markdown);
    }
    if (summary_json) *summary_json = copy_string(text);
  });
}

void es_synth_options_default(es_synth_options* out) {
  if (!out) return;
  const es::SyntheticSpec s;
  *out = es_synth_options{s.n_languages, s.n_templates, s.tokens, s.dim, s.language_noise, s.seed};
}

es_status es_synthesize(const char* dir, const es_synth_options* options, char** config_path) {
  ES_REQUIRE(dir);
  return guarded([&] {
    es::SyntheticSpec spec;
    if (options) {
      spec.n_languages = options->n_languages;
      spec.n_templates = options->n_templates;
      spec.tokens = options->tokens;
      spec.dim = options->dim;
      spec.language_noise = options->language_noise;
      spec.seed = options->seed;
    }
    const auto path = es::write_synthetic_dataset(dir, spec);
    if (config_path) *config_path = copy_string(path.string());
  });
}

}  // extern "C"
