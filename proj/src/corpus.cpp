#include "sidiwo/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sidiwo/model.hpp"

namespace sidiwo {

Document Document::from_tokens(std::span<const int32_t> tokens) {
  Document doc;
  std::map<int32_t, int32_t> acc;
  for (int32_t w : tokens) {
    if (w < 0) fail(ErrorCode::invalid_argument, "negative word id");
    ++acc[w];
  }
  doc.counts.assign(acc.begin(), acc.end());
  doc.total = static_cast<int64_t>(tokens.size());
  for (size_t i = 0; i < 3 && i < tokens.size(); ++i) doc.lead_words[i] = tokens[i];
  if (tokens.size() < 3) doc.lead_words = {-1, -1, -1};
  return doc;
}

Document Document::from_counts(std::vector<std::pair<int32_t, int32_t>> pairs) {
  std::map<int32_t, int32_t> acc;
  for (auto [w, c] : pairs) {
    if (w < 0) fail(ErrorCode::invalid_argument, "negative word id");
    if (c <= 0) fail(ErrorCode::invalid_argument, "counts must be positive");
    acc[w] += c;
  }
  Document doc;
  doc.counts.assign(acc.begin(), acc.end());
  for (auto [w, c] : doc.counts) doc.total += c;
  return doc;
}

std::vector<int64_t> Corpus::word_totals(std::span<const int64_t> ids) const {
  std::vector<int64_t> totals(static_cast<size_t>(vocab_size), 0);
  auto add = [&](const Document& doc) {
    for (auto [w, c] : doc.counts) totals[static_cast<size_t>(w)] += c;
  };
  if (ids.empty()) {
    for (const Document& doc : docs) add(doc);
  } else {
    for (int64_t id : ids) add(docs.at(static_cast<size_t>(id)));
  }
  return totals;
}

Corpus Corpus::subset(std::span<const int64_t> ids) const {
  Corpus out;
  out.vocab_size = vocab_size;
  out.vocab = vocab;
  out.docs.reserve(ids.size());
  for (int64_t id : ids) {
    out.docs.push_back(docs.at(static_cast<size_t>(id)));
    if (has_labels()) out.labels.push_back(labels.at(static_cast<size_t>(id)));
  }
  return out;
}

void Corpus::validate() const {
  if (vocab_size <= 0) fail(ErrorCode::invalid_argument, "vocab_size must be positive");
  if (!vocab.empty() && static_cast<int32_t>(vocab.size()) != vocab_size)
    fail(ErrorCode::length_mismatch, "vocabulary length does not match vocab_size");
  if (has_labels() && labels.size() != docs.size())
    fail(ErrorCode::length_mismatch, "label count does not match document count");
  for (size_t i = 0; i < docs.size(); ++i) {
    const Document& doc = docs[i];
    int64_t total = 0;
    int32_t prev = -1;
    for (auto [w, c] : doc.counts) {
      if (w < 0 || w >= vocab_size)
        fail(ErrorCode::invalid_argument,
             "word id " + std::to_string(w) + " out of range in document " + std::to_string(i));
      if (w <= prev) fail(ErrorCode::invalid_argument, "unsorted counts in document " + std::to_string(i));
      if (c <= 0) fail(ErrorCode::invalid_argument, "non-positive count in document " + std::to_string(i));
      prev = w;
      total += c;
    }
    if (total != doc.total)
      fail(ErrorCode::invalid_argument, "stored total disagrees with counts in document " + std::to_string(i));
    if (doc.has_lead_words()) {
      for (int32_t w : doc.lead_words)
        if (w < 0 || w >= vocab_size)
          fail(ErrorCode::invalid_argument, "lead word out of range in document " + std::to_string(i));
    }
  }
}

void TopicModel::validate(double tol, bool require_normalized) const {
  if (word_dists.rows() < 1 || word_dists.cols() < 1)
    fail(ErrorCode::model_invalid, "word distribution matrix is empty");
  if (weights.size() != word_dists.cols())
    fail(ErrorCode::model_invalid, "weight count " + std::to_string(weights.size()) +
                                       " does not match topic count " +
                                       std::to_string(word_dists.cols()));
  for (Index j = 0; j < word_dists.cols(); ++j) {
    if (word_dists.col(j).minCoeff() < -tol)
      fail(ErrorCode::model_invalid, "column " + std::to_string(j) + " has a negative entry");
    const double sum = word_dists.col(j).sum();
    if (require_normalized && std::abs(sum - 1.0) > tol)
      fail(ErrorCode::model_invalid,
           "column " + std::to_string(j) + " sums to " + std::to_string(sum) + ", expected 1");
  }
  if (weights.minCoeff() < -tol) fail(ErrorCode::model_invalid, "negative topic weight");
  if (require_normalized && std::abs(weights.sum() - 1.0) > tol)
    fail(ErrorCode::model_invalid,
         "topic weights sum to " + std::to_string(weights.sum()) + ", expected 1");
}

}  // namespace sidiwo
