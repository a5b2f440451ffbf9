#include "sidiwo/synth.hpp"

#include <vector>

#include "sidiwo/rng.hpp"

namespace sidiwo::synth {

TopicModel gen_hier_model(int levels, int32_t vocab_size, double background_mass) {
  if (levels < 1) fail(ErrorCode::shape_mismatch, "levels must be at least 1");
  if (levels > 20) fail(ErrorCode::shape_mismatch, "levels too large");
  const int32_t k = int32_t{1} << levels;
  if (k > vocab_size)
    fail(ErrorCode::shape_mismatch, "need vocab_size >= 2^levels topics, got " +
                                        std::to_string(vocab_size) + " words for " +
                                        std::to_string(k) + " topics");
  if (background_mass < 0.0 || background_mass >= 1.0)
    fail(ErrorCode::invalid_argument, "background mass must lie in [0, 1)");

  TopicModel model;
  model.word_dists = Matrix::Zero(vocab_size, k);
  model.weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
  const double bg = background_mass / static_cast<double>(vocab_size);
  // Each topic spreads its non-background mass evenly over its chain of
  // nested blocks (half, quarter, ..., leaf). Topics sharing ancestors
  // therefore share mass, which is what makes the hierarchy recoverable:
  // with disjoint leaf blocks only, the topics are near-orthogonal and a
  // rank-2 decomposition peels off single topics instead of grouping
  // related ones.
  const double per_level = (1.0 - background_mass) / static_cast<double>(levels);
  for (int32_t t = 0; t < k; ++t) {
    for (int32_t w = 0; w < vocab_size; ++w) model.word_dists(w, t) = bg;
    int32_t lo = 0, hi = vocab_size;
    for (int b = levels - 1; b >= 0; --b) {
      // bit b of the topic code picks a half of the current block
      const int32_t mid = lo + (hi - lo) / 2;
      if ((t >> b) & 1)
        lo = mid;
      else
        hi = mid;
      const double in_block = per_level / static_cast<double>(hi - lo);
      for (int32_t w = lo; w < hi; ++w) model.word_dists(w, t) += in_block;
    }
  }
  model.validate(1e-12);
  return model;
}

Corpus sample_corpus(const TopicModel& model, int64_t n_docs, int64_t doc_len, uint64_t seed) {
  model.validate();
  if (n_docs < 1 || doc_len < 1)
    fail(ErrorCode::invalid_argument, "need at least one document and one token per document");

  const Index d = model.vocab_size();
  const Index k = model.n_topics();
  Vector topic_cdf(k);
  double acc = 0.0;
  for (Index t = 0; t < k; ++t) {
    acc += model.weights(t);
    topic_cdf(t) = acc;
  }
  Matrix word_cdfs(d, k);
  for (Index t = 0; t < k; ++t) {
    acc = 0.0;
    for (Index w = 0; w < d; ++w) {
      acc += model.word_dists(w, t);
      word_cdfs(w, t) = acc;
    }
  }

  Corpus corpus;
  corpus.vocab_size = static_cast<int32_t>(d);
  corpus.docs.resize(static_cast<size_t>(n_docs));
  corpus.labels.resize(static_cast<size_t>(n_docs));
  std::vector<int32_t> tokens(static_cast<size_t>(doc_len));
  Vector word_cdf(d);
  for (int64_t i = 0; i < n_docs; ++i) {
    auto g = rng::stream(seed, static_cast<uint64_t>(i));
    const Index topic = rng::categorical(g, topic_cdf);
    word_cdf = word_cdfs.col(topic);
    for (int64_t t = 0; t < doc_len; ++t)
      tokens[static_cast<size_t>(t)] = static_cast<int32_t>(rng::categorical(g, word_cdf));
    corpus.docs[static_cast<size_t>(i)] = Document::from_tokens(tokens);
    corpus.labels[static_cast<size_t>(i)] = static_cast<int32_t>(topic);
  }
  return corpus;
}

}  // namespace sidiwo::synth
