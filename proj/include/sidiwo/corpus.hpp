#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sidiwo/errors.hpp"

namespace sidiwo {

/// A document is always stored as a sparse count vector. When the source
/// preserved token order (raw text, synthetic sampling) the first three
/// tokens are kept as well, which is what the triples estimator consumes.
/// Bag-of-words input has no order, so there `lead_words` stays unset.
struct Document {
  std::vector<std::pair<int32_t, int32_t>> counts;  // (word, count), word-ascending
  int64_t total = 0;                                // sum of counts
  std::array<int32_t, 3> lead_words{-1, -1, -1};

  bool has_lead_words() const { return lead_words[0] >= 0; }

  /// Build from an ordered token sequence; records counts and the leading
  /// three tokens (when present).
  static Document from_tokens(std::span<const int32_t> tokens);

  /// Build from (word, count) pairs in any order; pairs are merged and sorted.
  static Document from_counts(std::vector<std::pair<int32_t, int32_t>> pairs);
};

struct Corpus {
  int32_t vocab_size = 0;
  std::vector<Document> docs;
  std::vector<std::string> vocab;   // empty, or one token per word id
  std::vector<int32_t> labels;      // empty, or one ground-truth topic per doc

  int64_t n_docs() const { return static_cast<int64_t>(docs.size()); }
  bool has_labels() const { return !labels.empty(); }

  /// Word-count totals over a subset of documents (all docs when ids is
  /// empty). Used by relevance rankings.
  std::vector<int64_t> word_totals(std::span<const int64_t> ids = {}) const;

  /// Copy of the selected documents (labels carried along when present).
  Corpus subset(std::span<const int64_t> ids) const;

  /// Throws on out-of-range words, inconsistent totals, or label/doc
  /// length mismatch.
  void validate() const;
};

}  // namespace sidiwo
