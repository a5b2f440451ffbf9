#include "sidiwo/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sidiwo/hier.hpp"
#include "sidiwo/rng.hpp"

namespace sidiwo {

namespace {

Matrix rotation_matrix_l2(double a) {
  const double s = std::sqrt(std::max(0.0, 1.0 - a * a));
  Matrix o(2, 2);
  o << s, a, -a, s;
  return o;
}

double off_diagonal_cost_of_slabs(const std::vector<Matrix>& slabs) {
  if (slabs.empty()) return 0.0;
  const Index l1 = slabs.front().rows();
  const Index l2 = slabs.front().cols();
  Matrix sq = Matrix::Zero(l1, l2);
  for (const Matrix& g : slabs) sq += g.cwiseProduct(g);
  double cost = 0.0;
  for (Index i = 0; i < l1; ++i)
    for (Index j = 0; j < l2; ++j)
      if (i != j) cost += std::sqrt(sq(i, j));
  return cost;
}

// Eigenvectors of a random unit-norm combination of the slabs. Shared by
// the declared-realizable decompose path and the baseline recoverer.
Matrix rotation_from_eigen(const SlabSet& slabs, uint64_t seed) {
  const Index l = slabs.slabs.empty() ? 0 : slabs.slabs.front().rows();
  if (l == 0) fail(ErrorCode::invalid_argument, "empty slab set");
  const Index d = slabs.n_slabs();
  for (int attempt = 0; attempt < 5; ++attempt) {
    auto g = rng::stream(seed, static_cast<uint64_t>(attempt));
    Vector theta(d);
    for (Index r = 0; r < d; ++r) theta(r) = rng::normal(g);
    theta /= theta.norm();
    Matrix combined = Matrix::Zero(l, l);
    for (Index r = 0; r < d; ++r) combined += theta(r) * slabs.slabs[static_cast<size_t>(r)];
    combined = 0.5 * (combined + combined.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(combined);
    if (eig.info() != Eigen::Success) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (Index i = 0; i + 1 < l; ++i)
      gap = std::min(gap, eig.eigenvalues()(i + 1) - eig.eigenvalues()(i));
    if (l > 1 && gap < 1e-10) continue;
    Matrix rotation(l, l);
    for (Index i = 0; i < l; ++i) rotation.col(i) = eig.eigenvectors().col(l - 1 - i);
    return rotation;
  }
  fail(ErrorCode::eig_gap_too_small,
       "no random slab combination produced a usable eigenvalue gap after 5 draws");
}

}  // namespace

Whitener whiten(const Matrix& m2, Index l, double rank_tolerance) {
  linalg::TruncatedSvd svd;
  try {
    svd = linalg::truncated_svd(m2, l, rank_tolerance);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::rank_deficient)
      fail(ErrorCode::rank_deficient,
           std::string("whitening failed: ") + e.what());
    throw;
  }
  Whitener w;
  w.singular_values = svd.s;
  const Vector root = svd.s.cwiseSqrt();
  w.e = svd.u * root.asDiagonal();
  w.e_pinv = root.cwiseInverse().asDiagonal() * svd.u.transpose();
  return w;
}

Diagonalizer Diagonalizer::from_rotation(Whitener w, Matrix rotation) {
  const Index l = w.latent_dim();
  if (rotation.rows() != l || rotation.cols() != l)
    fail(ErrorCode::shape_mismatch, "rotation shape does not match whitener rank");
  if ((rotation.transpose() * rotation - Matrix::Identity(l, l)).cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorCode::invalid_argument, "rotation is not orthonormal");
  Diagonalizer dz;
  dz.d = rotation.transpose() * w.e_pinv;
  dz.rotation = std::move(rotation);
  dz.whitener = std::move(w);
  return dz;
}

double off_diagonal_cost(const Matrix& d, const SlabSet& slabs) {
  if (slabs.left_proj.rows() != d.rows() || slabs.left_proj.cols() != d.cols() ||
      slabs.right_proj.rows() != d.rows() || slabs.right_proj.cols() != d.cols())
    fail(ErrorCode::shape_mismatch, "slabs were not projected with a matrix of this shape");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((slabs.left_proj - d).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (slabs.right_proj - d).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorCode::shape_mismatch, "slabs were projected with a different matrix");
  return off_diagonal_cost_of_slabs(slabs.slabs);
}

double geometric_cost(const Matrix& d, const TopicModel& model) {
  model.validate(1e-8, false);
  if (d.cols() != model.vocab_size())
    fail(ErrorCode::shape_mismatch, "D must have vocab_size columns");
  const Index l = d.rows();
  const Matrix p = d * model.word_dists;  // l x k
  double cost = 0.0;
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < l; ++j) {
      if (i == j) continue;
      const Vector coeff =
          model.weights.array() * p.row(i).transpose().array() * p.row(j).transpose().array();
      cost += (model.word_dists * coeff).norm();
    }
  return cost;
}

QuarticCoefficients rotation_objective_coefficients(const SlabSet& h_slabs) {
  QuarticCoefficients c;
  for (const Matrix& slab : h_slabs.slabs) {
    if (slab.rows() != 2 || slab.cols() != 2)
      fail(ErrorCode::shape_mismatch, "rotation objective needs 2x2 slabs");
    const double h = 0.5 * (slab(0, 1) + slab(1, 0));  // symmetrized off-diagonal
    const double f = slab(0, 0) - slab(1, 1);
    c.c1 += 4.0 * h * h - f * f;
    c.c2 += -4.0 * f * h;
    c.c3 += 2.0 * f * h;
    c.c4 += f * f - 4.0 * h * h;
    c.c5 += h * h;
  }
  return c;
}

double rotation_objective(double a, const QuarticCoefficients& c) {
  if (!(a >= -1.0 && a <= 1.0))
    fail(ErrorCode::domain_error, "rotation parameter outside [-1, 1]");
  const double s = std::sqrt(std::max(0.0, 1.0 - a * a));
  const double a2 = a * a;
  return c.c1 * a2 * a2 + c.c2 * a2 * a * s + c.c3 * a * s + c.c4 * a2 + c.c5;
}

RotationSolution solve_rotation_l2(const QuarticCoefficients& c, int grid_size, int refine_iters) {
  if (grid_size < 3) fail(ErrorCode::invalid_argument, "grid_size must be at least 3");

  auto f = [&c](double a) { return rotation_objective(a, c); };
  // Coarse pass: locate the minimum value, then prefer the smallest |a|
  // among grid points within 1e-12 of it. An odd point count keeps 0 and
  // +-1 on the grid exactly.
  const int npts = grid_size | 1;
  const double step = 2.0 / static_cast<double>(npts - 1);
  auto grid_point = [step](int i) { return std::clamp(-1.0 + step * i, -1.0, 1.0); };
  double grid_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < npts; ++i) grid_min = std::min(grid_min, f(grid_point(i)));
  double best_a = 0.0, best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < npts; ++i) {
    const double a = grid_point(i);
    const double v = f(a);
    if (v > grid_min + 1e-12) continue;
    if (best_f == std::numeric_limits<double>::infinity() || std::abs(a) < std::abs(best_a)) {
      best_f = v;
      best_a = a;
    }
  }

  // Bracket refinement: each round shrinks the interval tenfold around the
  // incumbent, ending with a golden-section pass on the final bracket.
  double lo = std::max(-1.0, best_a - step);
  double hi = std::min(1.0, best_a + step);
  for (int round = 0; round < refine_iters; ++round) {
    const int pts = 201;
    const double h = (hi - lo) / (pts - 1);
    for (int i = 0; i < pts; ++i) {
      const double a = lo + h * i;
      const double v = f(a);
      if (v < best_f) {
        best_f = v;
        best_a = a;
      }
    }
    const double width = (hi - lo) / 10.0;
    lo = std::max(-1.0, best_a - width);
    hi = std::min(1.0, best_a + width);
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-12) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  if (f(mid) < best_f) {
    best_f = f(mid);
    best_a = mid;
  }

  RotationSolution sol;
  sol.a_star = best_a;
  sol.f_min = best_f;
  sol.rotation = rotation_matrix_l2(best_a);
  return sol;
}

RecoveredModel solve_parameters(const Matrix& b, const Vector& m1, bool project_to_simplex) {
  if (b.rows() != m1.size())
    fail(ErrorCode::shape_mismatch, "B and M1 disagree on vocabulary size");
  const Index l = b.cols();

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(b);
  const Vector s = cod.solve(m1);

  RecoveredModel out;
  out.centers = Matrix::Zero(b.rows(), l);
  out.weights = Vector::Zero(l);
  out.residual = (b * s - m1).norm();

  std::vector<Index> degenerate;
  for (Index i = 0; i < l; ++i) {
    if (std::abs(s(i)) < 1e-10) {
      degenerate.push_back(i);
      continue;  // zero column, zero weight
    }
    out.weights(i) = s(i) * s(i);
    out.centers.col(i) = b.col(i) / s(i);
  }
  for (Index i : degenerate)
    out.diagnostics.warnings.push_back("DegenerateWeight: component " + std::to_string(i) +
                                       " has vanishing weight and was reported as zero");

  // Deterministic output order: weights non-increasing.
  std::vector<Index> order(static_cast<size_t>(l));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index c) { return out.weights(a) > out.weights(c); });
  Matrix centers(b.rows(), l);
  Vector weights(l);
  for (Index i = 0; i < l; ++i) {
    centers.col(i) = out.centers.col(order[static_cast<size_t>(i)]);
    weights(i) = out.weights(order[static_cast<size_t>(i)]);
  }
  out.centers = std::move(centers);
  out.weights = std::move(weights);

  if (project_to_simplex) {
    for (Index i = 0; i < l; ++i)
      if (out.weights(i) > 0.0) out.centers.col(i) = hier::project_simplex(out.centers.col(i));
    const double total = out.weights.sum();
    if (total > 0.0) out.weights /= total;
    out.diagnostics.projected = true;
  }
  return out;
}

RecoveredModel extract_parameters(const Diagonalizer& dz, const Vector& m1,
                                  bool project_to_simplex) {
  // D^+ = E O for feasible diagonalizers; using the factored form avoids a
  // second SVD.
  return solve_parameters(dz.whitener.e * dz.rotation, m1, project_to_simplex);
}

RecoveredModel decompose(const MomentStats& stats, Index l, const DecomposeOptions& opts) {
  if (l < 1) fail(ErrorCode::invalid_argument, "l must be positive");
  if (l > 2 && !opts.assume_realizable)
    fail(ErrorCode::unsupported_rank,
         "l = " + std::to_string(l) +
             " needs the realizable (l = k) mode; only l in {1, 2} has a general rotation solver");

  Whitener w = whiten(stats.m2, l, opts.rank_tolerance);
  SlabSet h = project_third_moment(stats, w.e_pinv, w.e_pinv, opts.n_threads);

  RecoveredModel::Diagnostics diag;
  Matrix rotation;
  if (l == 1) {
    rotation = Matrix::Identity(1, 1);
  } else if (l == 2) {
    const QuarticCoefficients c = rotation_objective_coefficients(h);
    const RotationSolution sol = solve_rotation_l2(c, opts.grid_size, opts.refine_iters);
    rotation = sol.rotation;
    diag.a_star = sol.a_star;
    diag.f_min = sol.f_min;
  } else {
    rotation = rotation_from_eigen(h, opts.seed);
  }

  std::vector<Matrix> rotated;
  rotated.reserve(h.slabs.size());
  for (const Matrix& g : h.slabs) rotated.push_back(rotation.transpose() * g * rotation);
  diag.cost = off_diagonal_cost_of_slabs(rotated);

  Diagonalizer dz = Diagonalizer::from_rotation(std::move(w), std::move(rotation));
  RecoveredModel out = extract_parameters(dz, stats.m1, opts.project_to_simplex);
  diag.projected = out.diagnostics.projected;
  diag.warnings = std::move(out.diagnostics.warnings);
  out.diagnostics = std::move(diag);
  return out;
}

bool is_feasible(const Matrix& d, const Whitener& w, double tol) {
  if (d.cols() != w.vocab_dim() || d.rows() != w.latent_dim()) return false;
  const Matrix pinv = linalg::pseudo_inverse(d);
  const Matrix gram = pinv * pinv.transpose();
  const Matrix target = w.e * w.e.transpose();
  return (gram - target).norm() <= tol * target.norm();
}

RecoveredModel eigen_recover(const MomentStats& stats, Index k, uint64_t seed,
                             bool project_to_simplex, int n_threads) {
  Whitener w = whiten(stats.m2, k);
  SlabSet h = project_third_moment(stats, w.e_pinv, w.e_pinv, n_threads);
  Matrix rotation = rotation_from_eigen(h, seed);

  std::vector<Matrix> rotated;
  rotated.reserve(h.slabs.size());
  for (const Matrix& g : h.slabs) rotated.push_back(rotation.transpose() * g * rotation);

  Diagonalizer dz = Diagonalizer::from_rotation(std::move(w), std::move(rotation));
  RecoveredModel out = extract_parameters(dz, stats.m1, project_to_simplex);
  out.diagnostics.cost = off_diagonal_cost_of_slabs(rotated);
  return out;
}

}  // namespace sidiwo
