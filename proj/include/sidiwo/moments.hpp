#pragma once

#include <memory>
#include <tuple>

#include "sidiwo/corpus.hpp"
#include "sidiwo/model.hpp"
#include "sidiwo/tensor.hpp"

namespace sidiwo {

enum class Estimator { counts, triples };

const char* estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& name);

/// First and second empirical moments plus a replayable handle to the
/// source, so third-moment projections can stream a second pass without
/// ever materializing the full third-moment tensor. The source is either
/// a corpus (empirical path) or a topic model (exact path).
struct MomentStats {
  int64_t n_docs = 0;
  Vector m1;  // d
  Matrix m2;  // d x d
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<const TopicModel> exact_model;
  Estimator estimator = Estimator::counts;
  bool allow_short_docs = false;

  Index vocab_size() const { return m1.size(); }
  bool replayable() const { return corpus != nullptr || exact_model != nullptr; }
};

/// The d projected third-moment slices { left * M3_r * right^T }, each
/// l_left x l_right. This is the only representation of the third moment
/// the pipeline ever builds at full vocabulary scale.
struct SlabSet {
  Matrix left_proj;   // l_left x d
  Matrix right_proj;  // l_right x d
  std::vector<Matrix> slabs;

  Index n_slabs() const { return static_cast<Index>(slabs.size()); }
};

struct MomentOptions {
  Estimator estimator = Estimator::counts;
  // Admit two-token documents into M1/M2. Such documents make any later
  // third-moment pass fail, so this is off by default.
  bool allow_short_docs = false;
  int n_threads = 1;
};

/// One pass over the corpus: M1 as the average of per-document
/// probability-normalized counts, M2 as the average over ordered pairs of
/// distinct token positions. The triples path uses only the first three
/// tokens of each document; the counts path uses all of them.
MomentStats estimate_moments(std::shared_ptr<const Corpus> corpus, const MomentOptions& opts = {});

MomentStats estimate_moments_triples(std::shared_ptr<const Corpus> corpus, int n_threads = 1);
MomentStats estimate_moments_counts(std::shared_ptr<const Corpus> corpus,
                                    bool allow_short_docs = false, int n_threads = 1);

/// Population moments of a model: M1 = M w, M2 = M diag(w) M^T, and the
/// stats carry the model itself as the third-moment source.
MomentStats exact_stats(const TopicModel& model, bool require_normalized = true);

/// Dense population moments, including the full third-moment tensor.
/// Only valid for vocabularies small enough for Tensor3.
std::tuple<Vector, Matrix, linalg::Tensor3> exact_moments(const TopicModel& model,
                                                          bool require_normalized = true);

/// Second pass: accumulate left * M3_r * right^T for every word r by
/// streaming the stats' source. Both projections must have vocab_size
/// columns. Documents shorter than three tokens are rejected here even
/// when the first pass admitted them.
SlabSet project_third_moment(const MomentStats& stats, const Matrix& left, const Matrix& right,
                             int n_threads = 1);

}  // namespace sidiwo
