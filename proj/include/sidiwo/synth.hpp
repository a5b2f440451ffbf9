#pragma once

#include <cstdint>

#include "sidiwo/corpus.hpp"
#include "sidiwo/model.hpp"

namespace sidiwo::synth {

/// Topic model with 2^levels topics over nested half-vocabulary blocks:
/// each topic is uniform over the block selected by its binary code
/// (bit b halves the level-(b-1) block), mixed with `background_mass`
/// spread uniformly over the whole vocabulary. Topic proportions are
/// uniform. Vocabularies not divisible by 2^levels use near-halves.
TopicModel gen_hier_model(int levels, int32_t vocab_size, double background_mass = 0.05);

/// Draw n_docs documents of doc_len tokens each: topic from the model
/// weights, then tokens i.i.d. from that topic's word distribution.
/// Documents keep their leading three tokens and their topic label.
/// Sampling is counter-seeded per document, so the output depends only on
/// (model, n_docs, doc_len, seed).
Corpus sample_corpus(const TopicModel& model, int64_t n_docs, int64_t doc_len, uint64_t seed);

}  // namespace sidiwo::synth
