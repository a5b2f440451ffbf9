#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sidiwo/moments.hpp"

namespace sidiwo {

/// Whitening artifacts from the rank-l truncated SVD of M2:
/// E = U_l S_l^{1/2} and its pseudo-inverse E^+ = S_l^{-1/2} U_l^T.
struct Whitener {
  Matrix e;                // d x l
  Matrix e_pinv;           // l x d
  Vector singular_values;  // l

  Index vocab_dim() const { return e.rows(); }
  Index latent_dim() const { return e.cols(); }
};

Whitener whiten(const Matrix& m2, Index l, double rank_tolerance = 1e-10);

/// A feasible diagonalizer D = O^T E^+ together with the rotation and
/// whitener that certify feasibility.
struct Diagonalizer {
  Matrix d;         // l x d
  Matrix rotation;  // l x l orthonormal
  Whitener whitener;

  static Diagonalizer from_rotation(Whitener w, Matrix rotation);
};

/// sum_{i != j} ( sum_r slab_r(i,j)^2 )^{1/2} over ordered pairs. The
/// slabs must have been projected with this D on both sides.
double off_diagonal_cost(const Matrix& d, const SlabSet& slabs);

/// Same objective evaluated from exact model parameters instead of
/// projected slabs: sum_{i != j} || sum_h w_h <d_i, mu_h> <d_j, mu_h> mu_h ||_2.
double geometric_cost(const Matrix& d, const TopicModel& model);

/// Coefficients of the scalar objective F for the l = 2 rotation search,
/// summed over slices: per slice, with h the off-diagonal entry and f the
/// diagonal difference of the (symmetrized) 2x2 slab,
///   c1 = 4h^2 - f^2, c2 = -4fh, c3 = 2fh, c4 = f^2 - 4h^2, c5 = h^2.
struct QuarticCoefficients {
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
};

QuarticCoefficients rotation_objective_coefficients(const SlabSet& h_slabs);

/// F(a) = c1 a^4 + c2 a^3 sqrt(1-a^2) + c3 a sqrt(1-a^2) + c4 a^2 + c5,
/// equal to sum_r of the squared off-diagonal entry of the rotated slab.
/// Throws DomainError outside [-1, 1].
double rotation_objective(double a, const QuarticCoefficients& c);

struct RotationSolution {
  double a_star = 0.0;
  double f_min = 0.0;
  Matrix rotation;  // [[sqrt(1-a^2), a], [-a, sqrt(1-a^2)]]
};

/// Minimizes F over [-1, 1]: coarse uniform grid, then bracket refinement
/// around the incumbent. Ties on the coarse grid break toward small |a|.
RotationSolution solve_rotation_l2(const QuarticCoefficients& c, int grid_size = 10000,
                                   int refine_iters = 3);

struct RecoveredModel {
  Matrix centers;  // d x l pseudo-centers
  Vector weights;  // l, non-negative, non-increasing
  double residual = 0.0;

  struct Diagnostics {
    double a_star = std::numeric_limits<double>::quiet_NaN();
    double f_min = std::numeric_limits<double>::quiet_NaN();
    double cost = std::numeric_limits<double>::quiet_NaN();
    bool projected = false;
    std::vector<std::string> warnings;
  } diagnostics;

  Index vocab_size() const { return centers.rows(); }
  Index n_centers() const { return centers.cols(); }
};

/// Solve the parameter system given B = D^+ (d x l): least squares
/// B s = m1, then weights s_i^2 and centers b_i / s_i, ordered by
/// non-increasing weight. Components with |s_i| below 1e-10 are reported
/// as zero columns with a DegenerateWeight warning. With
/// `project_to_simplex` the non-degenerate centers are projected onto the
/// simplex and the weights renormalized to sum one.
RecoveredModel solve_parameters(const Matrix& b, const Vector& m1, bool project_to_simplex);

RecoveredModel extract_parameters(const Diagonalizer& dz, const Vector& m1,
                                  bool project_to_simplex);

struct DecomposeOptions {
  // Treat the requested l as the true latent dimension, enabling the
  // eigenvector-based rotation for l >= 3. Without this flag only
  // l in {1, 2} is accepted.
  bool assume_realizable = false;
  int grid_size = 10000;
  int refine_iters = 3;
  bool project_to_simplex = false;
  uint64_t seed = 0;
  int n_threads = 1;
  double rank_tolerance = 1e-10;
};

/// Whiten, project the third-moment slices, solve for the rotation
/// (Theorem-4-style grid when l = 2, eigenvectors of a random slab
/// combination in the declared-realizable case), and extract parameters.
RecoveredModel decompose(const MomentStats& stats, Index l, const DecomposeOptions& opts = {});

/// Certificate for membership in the feasible set { (E O)^+ }:
/// || D^+ D^{+T} - E E^T ||_F <= tol * || E E^T ||_F.
bool is_feasible(const Matrix& d, const Whitener& w, double tol);

/// Realizable-setting baseline: recover the rotation as the eigenvectors
/// of a random unit combination of the whitened slices. Retries up to
/// five draws when the eigenvalue gap is below 1e-10, then throws
/// EigGapTooSmall.
RecoveredModel eigen_recover(const MomentStats& stats, Index k, uint64_t seed,
                             bool project_to_simplex = false, int n_threads = 1);

}  // namespace sidiwo
