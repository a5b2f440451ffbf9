/* C interface to the sidiwo library.
 *
 * All functions return a sidiwo_status; results come back through out
 * parameters. Handles are opaque and must be released with the matching
 * _free function. On failure the thread-local message retrieved with
 * sidiwo_last_error() describes what went wrong.
 */
#ifndef SIDIWO_H
#define SIDIWO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SIDIWO_API __declspec(dllexport)
#else
#define SIDIWO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sidiwo_status {
  SIDIWO_OK = 0,
  SIDIWO_ERR_INVALID_ARGUMENT = 1,
  SIDIWO_ERR_IO = 2,
  SIDIWO_ERR_PARSE = 3,
  SIDIWO_ERR_EMPTY_CORPUS = 4,
  SIDIWO_ERR_DOCUMENT_TOO_SHORT = 5,
  SIDIWO_ERR_EMPTY_DOCUMENT = 6,
  SIDIWO_ERR_RANK_DEFICIENT = 7,
  SIDIWO_ERR_NOT_SYMMETRIC = 8,
  SIDIWO_ERR_SHAPE_MISMATCH = 9,
  SIDIWO_ERR_MODEL_INVALID = 10,
  SIDIWO_ERR_DOMAIN = 11,
  SIDIWO_ERR_DEGENERATE_WEIGHT = 12,
  SIDIWO_ERR_UNSUPPORTED_RANK = 13,
  SIDIWO_ERR_EIG_GAP_TOO_SMALL = 14,
  SIDIWO_ERR_DEGENERATE_SPLIT = 15,
  SIDIWO_ERR_LENGTH_MISMATCH = 16,
  SIDIWO_ERR_INTERNAL = 17
} sidiwo_status;

typedef struct sidiwo_corpus sidiwo_corpus;
typedef struct sidiwo_moments sidiwo_moments;
typedef struct sidiwo_model sidiwo_model;
typedef struct sidiwo_tree sidiwo_tree;

SIDIWO_API const char* sidiwo_version(void);
/* Structured name of a status ("RankDeficient", ...). */
SIDIWO_API const char* sidiwo_status_name(sidiwo_status status);
/* 1 when the status describes a numerical failure rather than bad input. */
SIDIWO_API int sidiwo_status_is_numerical(sidiwo_status status);
/* Message of the most recent failure on this thread ("" when none). */
SIDIWO_API const char* sidiwo_last_error(void);
/* Release a string returned through a char** out parameter. */
SIDIWO_API void sidiwo_string_free(char* s);

/* ---- corpus ---------------------------------------------------------- */

/* Bag-of-words file (3 header lines, then "doc word count" triplets,
 * 1-indexed). vocab_path may be NULL. */
SIDIWO_API sidiwo_status sidiwo_corpus_read_uci(const char* corpus_path, const char* vocab_path,
                                                sidiwo_corpus** out);
/* One document per line, whitespace tokens. stopwords_path may be NULL;
 * d_keep <= 0 keeps the whole vocabulary. */
SIDIWO_API sidiwo_status sidiwo_corpus_read_text(const char* text_path,
                                                 const char* stopwords_path, int32_t d_keep,
                                                 sidiwo_corpus** out);
SIDIWO_API sidiwo_status sidiwo_corpus_write_uci(const sidiwo_corpus* corpus,
                                                 const char* corpus_path, const char* vocab_path);
SIDIWO_API sidiwo_status sidiwo_corpus_n_docs(const sidiwo_corpus* corpus, int64_t* out);
SIDIWO_API sidiwo_status sidiwo_corpus_vocab_size(const sidiwo_corpus* corpus, int32_t* out);
/* Pointer owned by the corpus; valid until the corpus is freed. */
SIDIWO_API sidiwo_status sidiwo_corpus_word(const sidiwo_corpus* corpus, int32_t word_id,
                                            const char** out);
SIDIWO_API sidiwo_status sidiwo_corpus_has_labels(const sidiwo_corpus* corpus, int* out);
SIDIWO_API sidiwo_status sidiwo_corpus_write_labels(const sidiwo_corpus* corpus, const char* path);
SIDIWO_API void sidiwo_corpus_free(sidiwo_corpus* corpus);

/* Hierarchical synthetic model with 2^levels topics; samples n_docs
 * documents of doc_len tokens. The corpus carries ground-truth labels. */
SIDIWO_API sidiwo_status sidiwo_corpus_synth(int levels, int32_t vocab_size, int64_t n_docs,
                                             int64_t doc_len, uint64_t seed, sidiwo_corpus** out);

/* ---- moments --------------------------------------------------------- */

/* estimator: 0 = counts, 1 = triples. */
SIDIWO_API sidiwo_status sidiwo_moments_estimate(const sidiwo_corpus* corpus, int estimator,
                                                 int allow_short_docs, int n_threads,
                                                 sidiwo_moments** out);
SIDIWO_API sidiwo_status sidiwo_moments_save(const sidiwo_moments* moments, const char* path);
/* corpus may be NULL; without one the loaded moments cannot serve a
 * third-moment pass (decompose will fail). */
SIDIWO_API sidiwo_status sidiwo_moments_load(const char* path, const sidiwo_corpus* corpus,
                                             sidiwo_moments** out);
SIDIWO_API sidiwo_status sidiwo_moments_n_docs(const sidiwo_moments* moments, int64_t* out);
SIDIWO_API sidiwo_status sidiwo_moments_vocab_size(const sidiwo_moments* moments, int32_t* out);
SIDIWO_API void sidiwo_moments_free(sidiwo_moments* moments);

/* ---- decomposition --------------------------------------------------- */

typedef struct sidiwo_decompose_options {
  int assume_realizable; /* allow l >= 3 by declaring l = true rank */
  int grid_size;
  int refine_iters;
  int project_to_simplex;
  uint64_t seed;
  int n_threads;
} sidiwo_decompose_options;

SIDIWO_API void sidiwo_decompose_options_default(sidiwo_decompose_options* opts);

SIDIWO_API sidiwo_status sidiwo_decompose(const sidiwo_moments* moments, int32_t l,
                                          const sidiwo_decompose_options* opts,
                                          sidiwo_model** out);
SIDIWO_API sidiwo_status sidiwo_model_save(const sidiwo_model* model, const char* path);
SIDIWO_API sidiwo_status sidiwo_model_load(const char* path, sidiwo_model** out);
SIDIWO_API sidiwo_status sidiwo_model_dims(const sidiwo_model* model, int32_t* d, int32_t* l);
SIDIWO_API sidiwo_status sidiwo_model_weight(const sidiwo_model* model, int32_t i, double* out);
/* Copies center column i into out[0..d). */
SIDIWO_API sidiwo_status sidiwo_model_center(const sidiwo_model* model, int32_t i, double* out);
SIDIWO_API sidiwo_status sidiwo_model_residual(const sidiwo_model* model, double* out);
/* Diagnostics; entries that do not apply are NaN. */
SIDIWO_API sidiwo_status sidiwo_model_diagnostics(const sidiwo_model* model, double* a_star,
                                                  double* f_min, double* cost);
SIDIWO_API sidiwo_status sidiwo_model_warning_count(const sidiwo_model* model, int32_t* out);
SIDIWO_API sidiwo_status sidiwo_model_warning(const sidiwo_model* model, int32_t i,
                                              const char** out);
SIDIWO_API void sidiwo_model_free(sidiwo_model* model);

/* ---- divisive tree ---------------------------------------------------- */

typedef struct sidiwo_tree_options {
  int max_depth;
  int min_split_size;
  int estimator; /* 0 = counts, 1 = triples */
  int allow_short_docs;
  double lambda_relevance;
  int top_words;
  int grid_size;
  int refine_iters;
  int map_prior;
  int n_threads;
  int parallel; /* build sibling subtrees concurrently */
} sidiwo_tree_options;

SIDIWO_API void sidiwo_tree_options_default(sidiwo_tree_options* opts);

SIDIWO_API sidiwo_status sidiwo_tree_build(const sidiwo_corpus* corpus,
                                           const sidiwo_tree_options* opts, sidiwo_tree** out);
SIDIWO_API sidiwo_status sidiwo_tree_save_json(const sidiwo_tree* tree, const char* path,
                                               int emit_doc_ids);
SIDIWO_API sidiwo_status sidiwo_tree_load_json(const char* path, sidiwo_tree** out);
SIDIWO_API sidiwo_status sidiwo_tree_save_dot(const sidiwo_tree* tree, const char* path);
SIDIWO_API sidiwo_status sidiwo_tree_node_count(const sidiwo_tree* tree, int32_t* out);
/* Node fields by pre-order node id; child ids are -1 for leaves. */
SIDIWO_API sidiwo_status sidiwo_tree_node_info(const sidiwo_tree* tree, int32_t node_id,
                                               int32_t* depth, int64_t* n_docs,
                                               int32_t* left_child, int32_t* right_child);
SIDIWO_API sidiwo_status sidiwo_tree_node_top_word_count(const sidiwo_tree* tree, int32_t node_id,
                                                         int32_t* out);
SIDIWO_API sidiwo_status sidiwo_tree_node_top_word(const sidiwo_tree* tree, int32_t node_id,
                                                   int32_t i, const char** word,
                                                   double* relevance);
SIDIWO_API sidiwo_status sidiwo_tree_node_warning_count(const sidiwo_tree* tree, int32_t node_id,
                                                        int32_t* out);
SIDIWO_API sidiwo_status sidiwo_tree_node_warning(const sidiwo_tree* tree, int32_t node_id,
                                                  int32_t i, const char** out);
SIDIWO_API void sidiwo_tree_free(sidiwo_tree* tree);

/* ---- evaluation ------------------------------------------------------- */

/* Leaf-partition Adjusted Rand Index plus per-node purity against a labels
 * file (one integer per line). Out strings are allocated; free them with
 * sidiwo_string_free. Either of json_out / csv_out may be NULL. */
SIDIWO_API sidiwo_status sidiwo_tree_eval(const sidiwo_tree* tree, const char* labels_path,
                                          double* ari, char** json_out, char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SIDIWO_H */
