#pragma once

// Test-only reference implementations. These deliberately take the slow,
// direct route (dense tensors, explicit position enumeration) so they
// stay independent of the streaming production paths they check.

#include <random>

#include "sidiwo/corpus.hpp"
#include "sidiwo/model.hpp"
#include "sidiwo/moments.hpp"
#include "sidiwo/tensor.hpp"

namespace oracle {

using sidiwo::Corpus;
using sidiwo::Index;
using sidiwo::Matrix;
using sidiwo::TopicModel;
using sidiwo::Vector;

struct DenseMoments {
  Vector m1;
  Matrix m2;
  sidiwo::linalg::Tensor3 m3;
};

/// Empirical moments by expanding every document into a token list and
/// enumerating ordered tuples of distinct positions. With the triples
/// estimator only the three lead words are used.
DenseMoments brute_force_moments(const Corpus& corpus, sidiwo::Estimator estimator);

/// left * slice_r(m3) * right^T computed from the dense tensor.
Matrix dense_slab(const sidiwo::linalg::Tensor3& m3, const Matrix& left, const Matrix& right,
                  Index r);

/// Haar-ish random orthonormal matrix (QR of a Gaussian matrix).
Matrix random_rotation(Index l, std::mt19937_64& g);

/// Random topic model with simplex columns. With `separated` each topic
/// gets a dominant disjoint word block (70% mass) over a common uniform
/// floor, so columns are well separated and all inner products positive.
TopicModel random_model(Index d, Index k, std::mt19937_64& g, bool separated = false);

/// Direct evaluation of the rotation objective: rotate every slab by O_a
/// and sum the squared (0,1) entries.
double direct_objective(const std::vector<Matrix>& slabs, double a);

/// Pair-counting Adjusted Rand Index over all item pairs.
double pair_counting_ari(std::span<const int32_t> a, std::span<const int32_t> b);

}  // namespace oracle
