/* embedshape: topology of word embeddings compared against language trees.
 *
 * Every function returning es_status reports failures through the status
 * code; es_last_error() then describes the failure of the most recent call
 * on the calling thread. Objects are opaque handles released with their
 * matching *_free function. Strings returned through char** are released
 * with es_string_free. Strings returned as const char* stay valid until the
 * owning handle is freed.
 */
#ifndef EMBEDSHAPE_EMBEDSHAPE_H
#define EMBEDSHAPE_EMBEDSHAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(EMBEDSHAPE_BUILDING_LIBRARY)
#define ES_API __attribute__((visibility("default")))
#else
#define ES_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum es_status {
  ES_OK = 0,
  ES_ERR_PARSE = 1,
  ES_ERR_DEGENERATE_INPUT = 2,
  ES_ERR_EMPTY_INPUT = 3,
  ES_ERR_INVALID_MATRIX = 4,
  ES_ERR_INCONSISTENT_COMPLEX = 5,
  ES_ERR_DEGREE_MISMATCH = 6,
  ES_ERR_CONFIG = 7,
  ES_ERR_INSUFFICIENT_LEAVES = 8,
  ES_ERR_INVALID_TREE = 9,
  ES_ERR_LABEL_MISMATCH = 10,
  ES_ERR_DEGENERATE_CORRELATION = 11,
  ES_ERR_IO = 12,
  ES_ERR_INVALID_ARGUMENT = 100,
  ES_ERR_INTERNAL = 101
} es_status;

typedef struct es_embedding es_embedding;
typedef struct es_matrix es_matrix;
typedef struct es_diagrams es_diagrams;
typedef struct es_tree es_tree;
typedef struct es_labeling es_labeling;

ES_API const char* es_version(void);
ES_API const char* es_status_name(es_status status);
ES_API const char* es_last_error(void);
ES_API void es_string_free(char* s);

/* Embeddings (.vec text, optionally gzip-compressed). */
ES_API es_status es_embedding_load(const char* path, size_t max_tokens, es_embedding** out);
ES_API size_t es_embedding_size(const es_embedding* e);
ES_API size_t es_embedding_dim(const es_embedding* e);
ES_API const char* es_embedding_token(const es_embedding* e, size_t i);
/* metric: "euclidean" or "cosine". */
ES_API es_status es_embedding_distances(const es_embedding* e, const char* metric, int jobs, es_matrix** out);
ES_API void es_embedding_free(es_embedding* e);

/* Distance matrices: n labels, n*n row-major entries. */
ES_API es_status es_matrix_create(size_t n, const char* const* labels, const double* entries, es_matrix** out);
ES_API es_status es_matrix_load(const char* path, es_matrix** out);
/* ".bin" paths get the binary format, anything else CSV. */
ES_API es_status es_matrix_save(const es_matrix* m, const char* path);
ES_API size_t es_matrix_size(const es_matrix* m);
ES_API double es_matrix_get(const es_matrix* m, size_t i, size_t j);
ES_API const char* es_matrix_label(const es_matrix* m, size_t i);
ES_API void es_matrix_free(es_matrix* m);

/* Persistence diagrams for degrees 0..max_degree. */
/* threshold <= 0 uses the enclosing radius. */
ES_API es_status es_diagrams_compute(const es_matrix* m, int max_degree, double threshold, es_diagrams** out);
/* A set holding one diagram of the given degree (lower degrees empty). */
ES_API es_status es_diagrams_create(int degree, size_t n_bars, const double* births, const double* deaths,
                                    es_diagrams** out);
ES_API es_status es_diagrams_load_csv(const char* path, es_diagrams** out);
ES_API es_status es_diagrams_save_csv(const es_diagrams* d, const char* path);
ES_API int es_diagrams_max_degree(const es_diagrams* d);
ES_API size_t es_diagrams_count(const es_diagrams* d, int degree);
ES_API es_status es_diagrams_bar(const es_diagrams* d, int degree, size_t i, double* birth, double* death);
ES_API es_status es_plot_diagrams(const es_diagrams* d, const char* title, const char* svg_path);
ES_API void es_diagrams_free(es_diagrams* d);

typedef struct es_compare_options {
  int sw_slices;
  int grid_rows;
  int grid_cols;
  double range_min;
  double range_max;
  double sigma;
} es_compare_options;

/* Defaults for a token metric ("euclidean"/"cosine") and degree. */
ES_API es_status es_compare_options_default(const char* metric, int degree, es_compare_options* out);

/* method: "bottleneck", "sliced_wasserstein", "persistence_image",
 * "bar_stats". options may be NULL for the Euclidean defaults. */
ES_API es_status es_diagram_distance(const es_diagrams* a, const es_diagrams* b, int degree, const char* method,
                                     const es_compare_options* options, double* out);
ES_API es_status es_language_matrix(size_t n, const char* const* languages, const es_diagrams* const* diagrams,
                                    int degree, const char* method, const es_compare_options* options, int jobs,
                                    es_matrix** out);

/* Trees. algorithm: "upgma" or "nj". */
ES_API es_status es_tree_build(const es_matrix* m, const char* algorithm, es_tree** out);
ES_API es_status es_tree_parse(const char* newick, es_tree** out);
ES_API es_status es_tree_load(const char* path, es_tree** out);
ES_API es_status es_tree_newick(const es_tree* t, char** out);
ES_API size_t es_tree_leaf_count(const es_tree* t);
ES_API es_status es_tree_restrict(const es_tree* t, size_t n, const char* const* labels, es_tree** out);
/* kind: "path", "jrf1", "jrf2", "matching_split", "phylo_info",
 * "cluster_info". */
ES_API es_status es_tree_distance(const es_tree* a, const es_tree* b, const char* kind, double* out);
ES_API void es_tree_free(es_tree* t);

/* Permutation test results. z_score is meaningful only when z_defined. */
typedef struct es_report {
  double observed;
  double perm_mean;
  double perm_std;
  double z_score;
  int z_defined;
  size_t rank;
  size_t n_strictly_better;
  size_t n_ties;
  size_t n_permutations;
  double rank_p_value;
  uint64_t seed;
  char metric_kind[32];
} es_report;

ES_API es_status es_permutation_test(const es_tree* t, const es_tree* reference, const char* kind, size_t n,
                                     uint64_t seed, int jobs, es_report* out);
ES_API es_status es_spearman(const es_matrix* e, const es_matrix* d, double* out);

ES_API es_status es_qap_optimize(const es_tree* t, const es_matrix* d, size_t restarts, size_t stall_limit,
                                 uint64_t seed, int jobs, es_labeling** out);
ES_API double es_labeling_correlation(const es_labeling* l);
ES_API size_t es_labeling_size(const es_labeling* l);
ES_API const char* es_labeling_position(const es_labeling* l, size_t i);
ES_API const char* es_labeling_language(const es_labeling* l, size_t i);
ES_API es_status es_labeling_test(const es_tree* t, const es_labeling* l, const es_matrix* d, size_t n,
                                  uint64_t seed, int jobs, es_report* out);
ES_API void es_labeling_free(es_labeling* l);

/* Pipeline. stage: "ingest", "diagrams", "langdist", "trees", "evaluate",
 * "qap" or "run" (NULL means "run"). Overrides apply when set. */
typedef struct es_run_options {
  const char* stage;
  int has_seed;
  uint64_t seed;
  const char* cache_dir;
  int jobs; /* 0 keeps the configured value */
} es_run_options;

ES_API es_status es_pipeline_run(const char* config_path, const es_run_options* options, char** manifest_json);

/* Reads a manifest or a report directory; writes summary.json and
 * summary.md into out_dir when it is not NULL. */
ES_API es_status es_summarize(const char* source, const char* out_dir, char** summary_json);

typedef struct es_synth_options {
  size_t n_languages;
  size_t n_templates;
  size_t tokens;
  size_t dim;
  double language_noise;
  uint64_t seed;
} es_synth_options;

ES_API void es_synth_options_default(es_synth_options* out);
/* Writes a synthetic dataset and its config; returns the config path. */
ES_API es_status es_synthesize(const char* dir, const es_synth_options* options, char** config_path);

#ifdef __cplusplus
}
#endif

#endif /* EMBEDSHAPE_EMBEDSHAPE_H */
