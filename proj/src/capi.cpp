#include "sidiwo.h"

#include <cstring>
#include <memory>
#include <string>

#include "sidiwo/decompose.hpp"
#include "sidiwo/hier.hpp"
#include "sidiwo/io.hpp"
#include "sidiwo/metrics.hpp"
#include "sidiwo/moments.hpp"
#include "sidiwo/synth.hpp"

struct sidiwo_corpus {
  std::shared_ptr<const sidiwo::Corpus> impl;
};
struct sidiwo_moments {
  sidiwo::MomentStats impl;
};
struct sidiwo_model {
  sidiwo::RecoveredModel impl;
};
struct sidiwo_tree {
  sidiwo::hier::ClusterTree impl;
  std::vector<const sidiwo::hier::TreeNode*> nodes;  // pre-order, index = node_id

  void index_nodes() { nodes = impl.nodes(); }
};

namespace {

thread_local std::string g_last_error;

sidiwo_status status_of(sidiwo::ErrorCode code) {
  using sidiwo::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return SIDIWO_ERR_INVALID_ARGUMENT;
    case ErrorCode::io_failure: return SIDIWO_ERR_IO;
    case ErrorCode::parse_failure: return SIDIWO_ERR_PARSE;
    case ErrorCode::empty_corpus: return SIDIWO_ERR_EMPTY_CORPUS;
    case ErrorCode::document_too_short: return SIDIWO_ERR_DOCUMENT_TOO_SHORT;
    case ErrorCode::empty_document: return SIDIWO_ERR_EMPTY_DOCUMENT;
    case ErrorCode::rank_deficient: return SIDIWO_ERR_RANK_DEFICIENT;
    case ErrorCode::not_symmetric: return SIDIWO_ERR_NOT_SYMMETRIC;
    case ErrorCode::shape_mismatch: return SIDIWO_ERR_SHAPE_MISMATCH;
    case ErrorCode::model_invalid: return SIDIWO_ERR_MODEL_INVALID;
    case ErrorCode::domain_error: return SIDIWO_ERR_DOMAIN;
    case ErrorCode::degenerate_weight: return SIDIWO_ERR_DEGENERATE_WEIGHT;
    case ErrorCode::unsupported_rank: return SIDIWO_ERR_UNSUPPORTED_RANK;
    case ErrorCode::eig_gap_too_small: return SIDIWO_ERR_EIG_GAP_TOO_SMALL;
    case ErrorCode::degenerate_split: return SIDIWO_ERR_DEGENERATE_SPLIT;
    case ErrorCode::length_mismatch: return SIDIWO_ERR_LENGTH_MISMATCH;
    case ErrorCode::internal: return SIDIWO_ERR_INTERNAL;
  }
  return SIDIWO_ERR_INTERNAL;
}

template <typename Fn>
sidiwo_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SIDIWO_OK;
  } catch (const sidiwo::Error& e) {
    g_last_error = e.message();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SIDIWO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SIDIWO_ERR_INTERNAL;
  }
}

sidiwo_status bad_argument(const char* what) {
  g_last_error = what;
  return SIDIWO_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const sidiwo::hier::TreeNode* node_at(const sidiwo_tree* tree, int32_t node_id) {
  if (node_id < 0 || static_cast<size_t>(node_id) >= tree->nodes.size())
    sidiwo::fail(sidiwo::ErrorCode::invalid_argument,
                 "node id " + std::to_string(node_id) + " out of range");
  return tree->nodes[static_cast<size_t>(node_id)];
}

}  // namespace

extern "C" {

const char* sidiwo_version(void) { return "1.0.0"; }

const char* sidiwo_status_name(sidiwo_status status) {
  switch (status) {
    case SIDIWO_OK: return "Ok";
    case SIDIWO_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case SIDIWO_ERR_IO: return "IoFailure";
    case SIDIWO_ERR_PARSE: return "ParseFailure";
    case SIDIWO_ERR_EMPTY_CORPUS: return "EmptyCorpus";
    case SIDIWO_ERR_DOCUMENT_TOO_SHORT: return "DocumentTooShort";
    case SIDIWO_ERR_EMPTY_DOCUMENT: return "EmptyDocument";
    case SIDIWO_ERR_RANK_DEFICIENT: return "RankDeficient";
    case SIDIWO_ERR_NOT_SYMMETRIC: return "NotSymmetric";
    case SIDIWO_ERR_SHAPE_MISMATCH: return "ShapeMismatch";
    case SIDIWO_ERR_MODEL_INVALID: return "ModelInvalid";
    case SIDIWO_ERR_DOMAIN: return "DomainError";
    case SIDIWO_ERR_DEGENERATE_WEIGHT: return "DegenerateWeight";
    case SIDIWO_ERR_UNSUPPORTED_RANK: return "UnsupportedRank";
    case SIDIWO_ERR_EIG_GAP_TOO_SMALL: return "EigGapTooSmall";
    case SIDIWO_ERR_DEGENERATE_SPLIT: return "DegenerateSplit";
    case SIDIWO_ERR_LENGTH_MISMATCH: return "LengthMismatch";
    case SIDIWO_ERR_INTERNAL: return "InternalError";
  }
  return "UnknownError";
}

int sidiwo_status_is_numerical(sidiwo_status status) {
  switch (status) {
    case SIDIWO_ERR_RANK_DEFICIENT:
    case SIDIWO_ERR_NOT_SYMMETRIC:
    case SIDIWO_ERR_DOMAIN:
    case SIDIWO_ERR_DEGENERATE_WEIGHT:
    case SIDIWO_ERR_EIG_GAP_TOO_SMALL:
    case SIDIWO_ERR_DEGENERATE_SPLIT:
    case SIDIWO_ERR_INTERNAL:
      return 1;
    default:
      return 0;
  }
}

const char* sidiwo_last_error(void) { return g_last_error.c_str(); }

void sidiwo_string_free(char* s) { delete[] s; }

/* ---- corpus ---------------------------------------------------------- */

sidiwo_status sidiwo_corpus_read_uci(const char* corpus_path, const char* vocab_path,
                                     sidiwo_corpus** out) {
  if (corpus_path == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    auto corpus = std::make_shared<sidiwo::Corpus>(
        sidiwo::io::read_corpus_uci(corpus_path, vocab_path ? vocab_path : ""));
    *out = new sidiwo_corpus{std::move(corpus)};
  });
}

sidiwo_status sidiwo_corpus_read_text(const char* text_path, const char* stopwords_path,
                                      int32_t d_keep, sidiwo_corpus** out) {
  if (text_path == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    auto corpus = std::make_shared<sidiwo::Corpus>(
        sidiwo::io::read_corpus_text(text_path, stopwords_path ? stopwords_path : "", d_keep));
    *out = new sidiwo_corpus{std::move(corpus)};
  });
}

sidiwo_status sidiwo_corpus_write_uci(const sidiwo_corpus* corpus, const char* corpus_path,
                                      const char* vocab_path) {
  if (corpus == nullptr || corpus_path == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    sidiwo::io::write_corpus_uci(*corpus->impl, corpus_path, vocab_path ? vocab_path : "");
  });
}

sidiwo_status sidiwo_corpus_n_docs(const sidiwo_corpus* corpus, int64_t* out) {
  if (corpus == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = corpus->impl->n_docs();
  return SIDIWO_OK;
}

sidiwo_status sidiwo_corpus_vocab_size(const sidiwo_corpus* corpus, int32_t* out) {
  if (corpus == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = corpus->impl->vocab_size;
  return SIDIWO_OK;
}

sidiwo_status sidiwo_corpus_word(const sidiwo_corpus* corpus, int32_t word_id, const char** out) {
  if (corpus == nullptr || out == nullptr) return bad_argument("null pointer");
  if (word_id < 0 || word_id >= corpus->impl->vocab_size) return bad_argument("word id out of range");
  if (corpus->impl->vocab.empty()) return bad_argument("corpus has no vocabulary");
  *out = corpus->impl->vocab[static_cast<size_t>(word_id)].c_str();
  return SIDIWO_OK;
}

sidiwo_status sidiwo_corpus_has_labels(const sidiwo_corpus* corpus, int* out) {
  if (corpus == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = corpus->impl->has_labels() ? 1 : 0;
  return SIDIWO_OK;
}

sidiwo_status sidiwo_corpus_write_labels(const sidiwo_corpus* corpus, const char* path) {
  if (corpus == nullptr || path == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    if (!corpus->impl->has_labels())
      sidiwo::fail(sidiwo::ErrorCode::invalid_argument, "corpus carries no labels");
    sidiwo::io::write_labels(corpus->impl->labels, path);
  });
}

void sidiwo_corpus_free(sidiwo_corpus* corpus) { delete corpus; }

sidiwo_status sidiwo_corpus_synth(int levels, int32_t vocab_size, int64_t n_docs, int64_t doc_len,
                                  uint64_t seed, sidiwo_corpus** out) {
  if (out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    const sidiwo::TopicModel model = sidiwo::synth::gen_hier_model(levels, vocab_size);
    auto corpus = std::make_shared<sidiwo::Corpus>(
        sidiwo::synth::sample_corpus(model, n_docs, doc_len, seed));
    *out = new sidiwo_corpus{std::move(corpus)};
  });
}

/* ---- moments --------------------------------------------------------- */

sidiwo_status sidiwo_moments_estimate(const sidiwo_corpus* corpus, int estimator,
                                      int allow_short_docs, int n_threads, sidiwo_moments** out) {
  if (corpus == nullptr || out == nullptr) return bad_argument("null pointer");
  if (estimator != 0 && estimator != 1) return bad_argument("estimator must be 0 or 1");
  return guarded([&] {
    sidiwo::MomentOptions opts;
    opts.estimator = estimator == 0 ? sidiwo::Estimator::counts : sidiwo::Estimator::triples;
    opts.allow_short_docs = allow_short_docs != 0;
    opts.n_threads = n_threads;
    *out = new sidiwo_moments{sidiwo::estimate_moments(corpus->impl, opts)};
  });
}

sidiwo_status sidiwo_moments_save(const sidiwo_moments* moments, const char* path) {
  if (moments == nullptr || path == nullptr) return bad_argument("null pointer");
  return guarded([&] { sidiwo::io::save_moments(moments->impl, path); });
}

sidiwo_status sidiwo_moments_load(const char* path, const sidiwo_corpus* corpus,
                                  sidiwo_moments** out) {
  if (path == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    *out = new sidiwo_moments{
        sidiwo::io::load_moments(path, corpus ? corpus->impl : nullptr)};
  });
}

sidiwo_status sidiwo_moments_n_docs(const sidiwo_moments* moments, int64_t* out) {
  if (moments == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = moments->impl.n_docs;
  return SIDIWO_OK;
}

sidiwo_status sidiwo_moments_vocab_size(const sidiwo_moments* moments, int32_t* out) {
  if (moments == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = static_cast<int32_t>(moments->impl.vocab_size());
  return SIDIWO_OK;
}

void sidiwo_moments_free(sidiwo_moments* moments) { delete moments; }

/* ---- decomposition --------------------------------------------------- */

void sidiwo_decompose_options_default(sidiwo_decompose_options* opts) {
  if (opts == nullptr) return;
  opts->assume_realizable = 0;
  opts->grid_size = 10000;
  opts->refine_iters = 3;
  opts->project_to_simplex = 0;
  opts->seed = 0;
  opts->n_threads = 1;
}

sidiwo_status sidiwo_decompose(const sidiwo_moments* moments, int32_t l,
                               const sidiwo_decompose_options* opts, sidiwo_model** out) {
  if (moments == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    sidiwo_decompose_options defaults;
    sidiwo_decompose_options_default(&defaults);
    const sidiwo_decompose_options* o = opts ? opts : &defaults;
    sidiwo::DecomposeOptions dopts;
    dopts.assume_realizable = o->assume_realizable != 0;
    dopts.grid_size = o->grid_size;
    dopts.refine_iters = o->refine_iters;
    dopts.project_to_simplex = o->project_to_simplex != 0;
    dopts.seed = o->seed;
    dopts.n_threads = o->n_threads;
    *out = new sidiwo_model{sidiwo::decompose(moments->impl, l, dopts)};
  });
}

sidiwo_status sidiwo_model_save(const sidiwo_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return bad_argument("null pointer");
  return guarded([&] { sidiwo::io::save_model(model->impl, path); });
}

sidiwo_status sidiwo_model_load(const char* path, sidiwo_model** out) {
  if (path == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] { *out = new sidiwo_model{sidiwo::io::load_model(path)}; });
}

sidiwo_status sidiwo_model_dims(const sidiwo_model* model, int32_t* d, int32_t* l) {
  if (model == nullptr || d == nullptr || l == nullptr) return bad_argument("null pointer");
  *d = static_cast<int32_t>(model->impl.vocab_size());
  *l = static_cast<int32_t>(model->impl.n_centers());
  return SIDIWO_OK;
}

sidiwo_status sidiwo_model_weight(const sidiwo_model* model, int32_t i, double* out) {
  if (model == nullptr || out == nullptr) return bad_argument("null pointer");
  if (i < 0 || i >= model->impl.n_centers()) return bad_argument("component index out of range");
  *out = model->impl.weights(i);
  return SIDIWO_OK;
}

sidiwo_status sidiwo_model_center(const sidiwo_model* model, int32_t i, double* out) {
  if (model == nullptr || out == nullptr) return bad_argument("null pointer");
  if (i < 0 || i >= model->impl.n_centers()) return bad_argument("component index out of range");
  Eigen::Map<sidiwo::Vector>(out, model->impl.vocab_size()) = model->impl.centers.col(i);
  return SIDIWO_OK;
}

sidiwo_status sidiwo_model_residual(const sidiwo_model* model, double* out) {
  if (model == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = model->impl.residual;
  return SIDIWO_OK;
}

sidiwo_status sidiwo_model_diagnostics(const sidiwo_model* model, double* a_star, double* f_min,
                                       double* cost) {
  if (model == nullptr) return bad_argument("null pointer");
  if (a_star != nullptr) *a_star = model->impl.diagnostics.a_star;
  if (f_min != nullptr) *f_min = model->impl.diagnostics.f_min;
  if (cost != nullptr) *cost = model->impl.diagnostics.cost;
  return SIDIWO_OK;
}

sidiwo_status sidiwo_model_warning_count(const sidiwo_model* model, int32_t* out) {
  if (model == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = static_cast<int32_t>(model->impl.diagnostics.warnings.size());
  return SIDIWO_OK;
}

sidiwo_status sidiwo_model_warning(const sidiwo_model* model, int32_t i, const char** out) {
  if (model == nullptr || out == nullptr) return bad_argument("null pointer");
  if (i < 0 || static_cast<size_t>(i) >= model->impl.diagnostics.warnings.size())
    return bad_argument("warning index out of range");
  *out = model->impl.diagnostics.warnings[static_cast<size_t>(i)].c_str();
  return SIDIWO_OK;
}

void sidiwo_model_free(sidiwo_model* model) { delete model; }

/* ---- divisive tree ---------------------------------------------------- */

void sidiwo_tree_options_default(sidiwo_tree_options* opts) {
  if (opts == nullptr) return;
  opts->max_depth = 3;
  opts->min_split_size = 20;
  opts->estimator = 0;
  opts->allow_short_docs = 0;
  opts->lambda_relevance = 0.7;
  opts->top_words = 10;
  opts->grid_size = 10000;
  opts->refine_iters = 3;
  opts->map_prior = 0;
  opts->n_threads = 1;
  opts->parallel = 0;
}

sidiwo_status sidiwo_tree_build(const sidiwo_corpus* corpus, const sidiwo_tree_options* opts,
                                sidiwo_tree** out) {
  if (corpus == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    sidiwo_tree_options defaults;
    sidiwo_tree_options_default(&defaults);
    const sidiwo_tree_options* o = opts ? opts : &defaults;
    sidiwo::hier::TreeOptions topts;
    topts.max_depth = o->max_depth;
    topts.min_split_size = o->min_split_size;
    topts.estimator = o->estimator == 0 ? sidiwo::Estimator::counts : sidiwo::Estimator::triples;
    topts.allow_short_docs = o->allow_short_docs != 0;
    topts.lambda_relevance = o->lambda_relevance;
    topts.top_words = o->top_words;
    topts.grid_size = o->grid_size;
    topts.refine_iters = o->refine_iters;
    topts.map_prior = o->map_prior != 0;
    topts.n_threads = o->n_threads;
    topts.parallel = o->parallel != 0;
    auto* tree = new sidiwo_tree{sidiwo::hier::build_tree(*corpus->impl, topts), {}};
    tree->index_nodes();
    *out = tree;
  });
}

sidiwo_status sidiwo_tree_save_json(const sidiwo_tree* tree, const char* path, int emit_doc_ids) {
  if (tree == nullptr || path == nullptr) return bad_argument("null pointer");
  return guarded([&] { sidiwo::io::save_tree(tree->impl, path, emit_doc_ids != 0); });
}

sidiwo_status sidiwo_tree_load_json(const char* path, sidiwo_tree** out) {
  if (path == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    auto* tree = new sidiwo_tree{sidiwo::io::load_tree(path), {}};
    tree->index_nodes();
    *out = tree;
  });
}

sidiwo_status sidiwo_tree_save_dot(const sidiwo_tree* tree, const char* path) {
  if (tree == nullptr || path == nullptr) return bad_argument("null pointer");
  return guarded([&] { sidiwo::io::save_tree_dot(tree->impl, path); });
}

sidiwo_status sidiwo_tree_node_count(const sidiwo_tree* tree, int32_t* out) {
  if (tree == nullptr || out == nullptr) return bad_argument("null pointer");
  *out = static_cast<int32_t>(tree->nodes.size());
  return SIDIWO_OK;
}

sidiwo_status sidiwo_tree_node_info(const sidiwo_tree* tree, int32_t node_id, int32_t* depth,
                                    int64_t* n_docs, int32_t* left_child, int32_t* right_child) {
  if (tree == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    const auto* node = node_at(tree, node_id);
    if (depth != nullptr) *depth = node->depth;
    if (n_docs != nullptr) *n_docs = static_cast<int64_t>(node->doc_ids.size());
    if (left_child != nullptr) *left_child = node->is_leaf() ? -1 : node->left->node_id;
    if (right_child != nullptr) *right_child = node->is_leaf() ? -1 : node->right->node_id;
  });
}

sidiwo_status sidiwo_tree_node_top_word_count(const sidiwo_tree* tree, int32_t node_id,
                                              int32_t* out) {
  if (tree == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] { *out = static_cast<int32_t>(node_at(tree, node_id)->top_words.size()); });
}

sidiwo_status sidiwo_tree_node_top_word(const sidiwo_tree* tree, int32_t node_id, int32_t i,
                                        const char** word, double* relevance) {
  if (tree == nullptr || word == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    const auto* node = node_at(tree, node_id);
    if (i < 0 || static_cast<size_t>(i) >= node->top_words.size())
      sidiwo::fail(sidiwo::ErrorCode::invalid_argument, "word index out of range");
    *word = node->top_words[static_cast<size_t>(i)].first.c_str();
    if (relevance != nullptr) *relevance = node->top_words[static_cast<size_t>(i)].second;
  });
}

sidiwo_status sidiwo_tree_node_warning_count(const sidiwo_tree* tree, int32_t node_id,
                                             int32_t* out) {
  if (tree == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] { *out = static_cast<int32_t>(node_at(tree, node_id)->warnings.size()); });
}

sidiwo_status sidiwo_tree_node_warning(const sidiwo_tree* tree, int32_t node_id, int32_t i,
                                       const char** out) {
  if (tree == nullptr || out == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    const auto* node = node_at(tree, node_id);
    if (i < 0 || static_cast<size_t>(i) >= node->warnings.size())
      sidiwo::fail(sidiwo::ErrorCode::invalid_argument, "warning index out of range");
    *out = node->warnings[static_cast<size_t>(i)].c_str();
  });
}

void sidiwo_tree_free(sidiwo_tree* tree) { delete tree; }

/* ---- evaluation ------------------------------------------------------- */

sidiwo_status sidiwo_tree_eval(const sidiwo_tree* tree, const char* labels_path, double* ari,
                               char** json_out, char** csv_out) {
  if (tree == nullptr || labels_path == nullptr) return bad_argument("null pointer");
  return guarded([&] {
    const std::vector<int32_t> labels = sidiwo::io::read_labels(labels_path);
    const sidiwo::io::EvalReport report = sidiwo::io::evaluate_tree(tree->impl, labels);
    if (ari != nullptr) *ari = report.ari;
    if (json_out != nullptr) *json_out = copy_string(sidiwo::io::eval_report_json(report));
    if (csv_out != nullptr) *csv_out = copy_string(sidiwo::io::eval_report_csv(report));
  });
}

} /* extern "C" */
