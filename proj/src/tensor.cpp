#include "sidiwo/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sidiwo::linalg {

namespace {

constexpr Index kMaxTensorEntries = 10'000'000;

void fix_column_signs(Matrix& u) {
  for (Index c = 0; c < u.cols(); ++c) {
    for (Index r = 0; r < u.rows(); ++r) {
      double v = u(r, c);
      if (std::abs(v) > 1e-12) {
        if (v < 0) u.col(c) = -u.col(c);
        break;
      }
    }
  }
}

void check_symmetric_input(const Matrix& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::shape_mismatch, "matrix must be square, got " +
                                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    fail(ErrorCode::not_symmetric,
         "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
}

// Dense path: full eigendecomposition, then keep the top l pairs.
TruncatedSvd top_pairs_dense(const Matrix& sym, Index l) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::internal, "eigendecomposition did not converge");
  const Index d = sym.rows();
  TruncatedSvd out;
  out.u.resize(d, l);
  out.s.resize(l);
  // SelfAdjointEigenSolver sorts ascending.
  for (Index i = 0; i < l; ++i) {
    out.u.col(i) = eig.eigenvectors().col(d - 1 - i);
    out.s(i) = eig.eigenvalues()(d - 1 - i);
  }
  return out;
}

// Shifted subspace iteration for the top-l eigenpairs of a symmetric
// matrix. The Gershgorin shift keeps the iteration aligned with the
// algebraically largest eigenvalues even when small negative eigenvalues
// are present (empirical second moments are only approximately PSD).
TruncatedSvd top_pairs_iterative(const Matrix& sym, Index l) {
  const Index d = sym.rows();
  const Index block = std::min<Index>(d, l + 6);
  const double shift = sym.cwiseAbs().rowwise().sum().maxCoeff();

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Matrix q(d, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < d; ++i) q(i, j) = normal(rng);
  q = Eigen::HouseholderQR<Matrix>(q).householderQ() * Matrix::Identity(d, block);

  Matrix ritz_vecs;
  Vector ritz_vals;
  const int max_iters = 2000;
  double resid = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    Matrix z = sym * q + shift * q;
    q = Eigen::HouseholderQR<Matrix>(z).householderQ() * Matrix::Identity(d, block);
    Matrix small = q.transpose() * (sym * q);
    small = 0.5 * (small + small.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(small);
    ritz_vals.resize(block);
    ritz_vecs.resize(d, block);
    for (Index i = 0; i < block; ++i) {
      ritz_vals(i) = eig.eigenvalues()(block - 1 - i);
      ritz_vecs.col(i) = q * eig.eigenvectors().col(block - 1 - i);
    }
    if (it % 5 == 4 || it == max_iters - 1) {
      resid = 0.0;
      for (Index i = 0; i < l; ++i) {
        double r = (sym * ritz_vecs.col(i) - ritz_vals(i) * ritz_vecs.col(i)).norm();
        resid = std::max(resid, r);
      }
      double scale = std::max(std::abs(ritz_vals(0)), 1e-300);
      if (resid <= 1e-11 * scale) break;
    }
  }
  TruncatedSvd out;
  out.u = ritz_vecs.leftCols(l);
  out.s = ritz_vals.head(l);
  return out;
}

}  // namespace

Tensor3::Tensor3(Index d1, Index d2, Index d3) : dims_{d1, d2, d3} {
  if (d1 <= 0 || d2 <= 0 || d3 <= 0)
    fail(ErrorCode::invalid_argument, "tensor dimensions must be positive");
  const unsigned long long entries = static_cast<unsigned long long>(d1) *
                                     static_cast<unsigned long long>(d2) *
                                     static_cast<unsigned long long>(d3);
  if (d1 > kMaxTensorEntries || d2 > kMaxTensorEntries || d3 > kMaxTensorEntries ||
      entries > static_cast<unsigned long long>(kMaxTensorEntries))
    fail(ErrorCode::invalid_argument, "tensor too large to materialize densely");
  data_.assign(static_cast<size_t>(entries), 0.0);
}

size_t Tensor3::offset(Index i, Index j, Index k) const {
  if (i < 0 || i >= dims_[0] || j < 0 || j >= dims_[1] || k < 0 || k >= dims_[2])
    fail(ErrorCode::invalid_argument, "tensor index out of range");
  return (static_cast<size_t>(i) * static_cast<size_t>(dims_[1]) + static_cast<size_t>(j)) *
             static_cast<size_t>(dims_[2]) +
         static_cast<size_t>(k);
}

bool Tensor3::is_symmetric(double tol) const {
  if (dims_[0] != dims_[1] || dims_[1] != dims_[2]) return false;
  const Index d = dims_[0];
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j)
      for (Index k = j; k < d; ++k) {
        const double ref = (*this)(i, j, k);
        const double perms[] = {(*this)(i, k, j), (*this)(j, i, k),
                                (*this)(j, k, i), (*this)(k, i, j), (*this)(k, j, i)};
        for (double p : perms)
          if (std::abs(p - ref) > tol) return false;
      }
  return true;
}

Matrix Tensor3::mode2_slice(Index r) const {
  if (r < 0 || r >= dims_[1]) fail(ErrorCode::invalid_argument, "slice index out of range");
  Matrix out(dims_[0], dims_[2]);
  for (Index i = 0; i < dims_[0]; ++i)
    for (Index k = 0; k < dims_[2]; ++k) out(i, k) = (*this)(i, r, k);
  return out;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3 Tensor3::symmetric_rank_k(const Matrix& cols, const Vector& weights) {
  if (cols.cols() != weights.size())
    fail(ErrorCode::shape_mismatch, "column count does not match weight count");
  const Index d = cols.rows();
  Tensor3 t(d, d, d);
  for (Index h = 0; h < cols.cols(); ++h) {
    const auto v = cols.col(h);
    const double w = weights(h);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        const double vij = w * v(i) * v(j);
        if (vij == 0.0) continue;
        for (Index k = 0; k < d; ++k) t(i, j, k) += vij * v(k);
      }
  }
  return t;
}

TruncatedSvd truncated_svd(const Matrix& a, Index l, double rank_tolerance) {
  check_symmetric_input(a);
  const Index d = a.rows();
  if (l < 1 || l > d)
    fail(ErrorCode::invalid_argument,
         "requested rank " + std::to_string(l) + " outside [1, " + std::to_string(d) + "]");
  Matrix sym = 0.5 * (a + a.transpose());

  TruncatedSvd out = (d > 400 && 4 * l < d) ? top_pairs_iterative(sym, l) : top_pairs_dense(sym, l);
  out.rank_used = l;

  const double top = out.s(0);
  if (!(top > 0.0) || out.s(l - 1) < rank_tolerance * top)
    fail(ErrorCode::rank_deficient,
         "singular value " + std::to_string(l) + " of " + std::to_string(d) +
             " is below the rank tolerance; lower the requested rank");
  fix_column_signs(out.u);
  return out;
}

Matrix pseudo_inverse(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const double cutoff = 1e-12 * sv(0);
  Vector inv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

bool is_odeco_2x2x2(const Tensor3& t, double tol) {
  if (t.dim(0) != 2 || t.dim(1) != 2 || t.dim(2) != 2)
    fail(ErrorCode::shape_mismatch, "odeco criterion is defined for 2x2x2 tensors");
  if (!t.is_symmetric(1e-8)) fail(ErrorCode::not_symmetric, "tensor is not symmetric");
  // Indices below are zero-based; the criterion reads
  // T(1,1,1)T(2,2,1) + T(2,1,1)T(2,2,2) = T(2,1,1)^2 + T(2,2,1)^2 one-based.
  const double lhs = t(0, 0, 0) * t(1, 1, 0) + t(1, 0, 0) * t(1, 1, 1);
  const double rhs = t(1, 0, 0) * t(1, 0, 0) + t(1, 1, 0) * t(1, 1, 0);
  return std::abs(lhs - rhs) <= tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

Tensor3 odeco_counterexample() {
  const double s3 = std::sqrt(3.0);
  const double root = std::sqrt(9.0 + 5.0 * s3);
  const double a = (1.0 + s3) / (2.0 * root);
  const double b = (2.0 + s3) / root;
  Tensor3 t(2, 2, 2);
  t(0, 0, 0) = 2.0 * a * a * a + b * b * b;
  t(0, 1, 1) = a;
  t(1, 0, 1) = a;
  t(1, 1, 0) = a;
  // Remaining entries are exactly zero.
  return t;
}

}  // namespace sidiwo::linalg
