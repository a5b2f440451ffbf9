#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sidiwo/corpus.hpp"
#include "sidiwo/decompose.hpp"
#include "sidiwo/hier.hpp"
#include "sidiwo/moments.hpp"

namespace sidiwo::io {

/// Bag-of-words reader: three header lines (documents, vocabulary size,
/// non-zero count) followed by `doc_id word_id count` triplets, 1-indexed
/// with ascending doc_id. An optional vocabulary file supplies one token
/// per line. Parse errors report the offending line number.
Corpus read_corpus_uci(const std::string& corpus_path, const std::string& vocab_path = "");

void write_corpus_uci(const Corpus& corpus, const std::string& corpus_path,
                      const std::string& vocab_path = "");

/// Raw text reader: one document per line, whitespace-tokenized. Tokens
/// from the stop-word file (one per line) are dropped, then the d_keep
/// most frequent remaining tokens become the vocabulary (frequency ties
/// break lexicographically). d_keep <= 0 keeps every token. The first
/// three retained tokens of each document are recorded for the triples
/// estimator.
Corpus read_corpus_text(const std::string& text_path, const std::string& stopwords_path = "",
                        int32_t d_keep = 0);

std::vector<int32_t> read_labels(const std::string& path);
void write_labels(std::span<const int32_t> labels, const std::string& path);

/// Moments artifact (versioned JSON): n, estimator settings, M1 and M2.
/// The corpus is not serialized; attach one at load time to enable the
/// third-moment pass. The attached corpus must agree on document count
/// and vocabulary size.
void save_moments(const MomentStats& stats, const std::string& path);
MomentStats load_moments(const std::string& path,
                         std::shared_ptr<const Corpus> corpus = nullptr);

void save_model(const RecoveredModel& model, const std::string& path);
RecoveredModel load_model(const std::string& path);

/// Tree artifact (versioned JSON). Document ids per node are emitted only
/// when `emit_doc_ids` is set; evaluation requires them.
void save_tree(const hier::ClusterTree& tree, const std::string& path, bool emit_doc_ids = true);
hier::ClusterTree load_tree(const std::string& path);

/// Graphviz export; each node is labelled with its top five words.
void save_tree_dot(const hier::ClusterTree& tree, const std::string& path);

struct EvalNodeRow {
  int node_id = 0;
  int depth = 0;
  int64_t n_docs = 0;
  bool leaf = false;
  double purity = 0.0;
};

struct EvalReport {
  double ari = 0.0;  // leaf partition vs. the given labels
  std::vector<EvalNodeRow> rows;
};

EvalReport evaluate_tree(const hier::ClusterTree& tree, std::span<const int32_t> labels);
std::string eval_report_json(const EvalReport& report);
std::string eval_report_csv(const EvalReport& report);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sidiwo::io
