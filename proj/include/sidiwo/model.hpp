#pragma once

#include "sidiwo/tensor.hpp"

namespace sidiwo {

/// Ground-truth single topic model: word distributions as columns of a
/// d x k matrix and topic proportions, both on the probability simplex.
struct TopicModel {
  Matrix word_dists;  // d x k
  Vector weights;     // k

  Index vocab_size() const { return word_dists.rows(); }
  Index n_topics() const { return word_dists.cols(); }

  /// Throws ModelInvalid naming the violated constraint. Shape and
  /// non-negativity are always enforced; the simplex sums only when
  /// `require_normalized` (rank-style constructions such as the odeco
  /// counterexample model use unnormalized columns and weights).
  void validate(double tol = 1e-8, bool require_normalized = true) const;
};

}  // namespace sidiwo
