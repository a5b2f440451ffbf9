#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "sidiwo/errors.hpp"

namespace sidiwo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Dense order-3 tensor, row-major over (i, j, k). Intended for small test
/// instances and exact-moment construction; the constructor rejects shapes
/// with more than 10^7 entries so a full vocabulary-cubed tensor can never
/// be materialized by accident.
class Tensor3 {
 public:
  Tensor3(Index d1, Index d2, Index d3);

  Index dim(int mode) const { return dims_[static_cast<size_t>(mode)]; }
  Index size() const { return static_cast<Index>(data_.size()); }

  double operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }
  double& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }

  /// True when the tensor is cubical and invariant under all six mode
  /// permutations within `tol`.
  bool is_symmetric(double tol = 1e-12) const;

  /// Slice across the second mode: out(i, k) = (*this)(i, r, k).
  Matrix mode2_slice(Index r) const;

  double max_abs() const;

  /// sum_h weights(h) * cols.col(h) ⊗ cols.col(h) ⊗ cols.col(h)
  static Tensor3 symmetric_rank_k(const Matrix& cols, const Vector& weights);

 private:
  size_t offset(Index i, Index j, Index k) const;

  std::array<Index, 3> dims_;
  std::vector<double> data_;
};

struct TruncatedSvd {
  Matrix u;        // d x l, orthonormal columns
  Vector s;        // l positive singular values, non-increasing
  Index rank_used = 0;
};

/// Rank-l truncated SVD of a symmetric positive semi-definite matrix.
/// Columns of U are sign-fixed (first significant entry positive) and
/// ordered by non-increasing singular value, so results are reproducible
/// across runs. Throws RankDeficient when s(l-1)/s(0) < rank_tolerance.
/// Large inputs with l << d are handled by shifted subspace iteration
/// instead of a full eigendecomposition.
TruncatedSvd truncated_svd(const Matrix& a, Index l, double rank_tolerance = 1e-10);

/// Moore-Penrose pseudo-inverse via SVD with singular values below
/// 1e-12 * s_max treated as zero.
Matrix pseudo_inverse(const Matrix& a);

/// Orthogonal-decomposability test for 2x2x2 symmetric tensors: compares
/// the two sides of
///   T111*T221 + T211*T222 = T211^2 + T221^2
/// and accepts when |lhs - rhs| <= tol * max(1, |lhs|, |rhs|).
bool is_odeco_2x2x2(const Tensor3& t, double tol);

/// The 2x2x2 symmetric tensor obtained by whitening the rank-3 model
/// mu1 = e1, mu2 = e2, mu3 = (1,1,1), omega = (1,1,1) with the top two
/// singular pairs of its second moment. It does not admit a symmetric
/// orthogonal decomposition.
Tensor3 odeco_counterexample();

}  // namespace linalg
}  // namespace sidiwo
