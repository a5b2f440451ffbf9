// Acceptance suite: one line per criterion, non-zero exit if any fails.
// Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "sidiwo/decompose.hpp"
#include "sidiwo/hier.hpp"
#include "sidiwo/metrics.hpp"
#include "sidiwo/moments.hpp"
#include "sidiwo/synth.hpp"
#include "support/oracles.hpp"

using namespace sidiwo;

namespace {

int g_failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name,
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c);
  return buffer;
}

// ---- criterion 1: realizable exact recovery -----------------------------

void criterion_realizable_recovery() {
  std::mt19937_64 g(101);
  const auto start = std::chrono::steady_clock::now();
  double worst_center = 0.0, worst_weight = 0.0;
  bool pass = true;
  for (int rep = 0; rep < 20; ++rep) {
    const TopicModel model = oracle::random_model(10, 3, g, /*separated=*/true);
    const MomentStats stats = exact_stats(model);
    DecomposeOptions opts;
    opts.assume_realizable = true;
    opts.seed = 7;
    for (const RecoveredModel& rec :
         {decompose(stats, 3, opts), eigen_recover(stats, 3, 11)}) {
      const auto match = metrics::match_columns(rec.centers, model.word_dists);
      worst_center = std::max(worst_center, match.max_error);
      for (int i = 0; i < 3; ++i) {
        const double err =
            std::abs(rec.weights(i) - model.weights(match.permutation[size_t(i)]));
        worst_weight = std::max(worst_weight, err);
      }
    }
  }
  const double elapsed = seconds_since(start);
  pass = worst_center <= 1e-6 && worst_weight <= 1e-6 && elapsed < 1.0;
  report(1, "realizable exact recovery", pass,
         fmt("max center err %.2e, max weight err %.2e, %.2f s", worst_center, worst_weight,
             elapsed));
}

// ---- criterion 2: synthetic hierarchy reproduction ----------------------

void criterion_hierarchy_reproduction() {
  const TopicModel model = synth::gen_hier_model(3, 100);
  double sum = 0.0, minimum = 1.0, max_run = 0.0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto start = std::chrono::steady_clock::now();
    const Corpus corpus = synth::sample_corpus(model, 400, 50, seed);
    hier::TreeOptions opts;
    opts.max_depth = 3;
    const hier::ClusterTree tree = hier::build_tree(corpus, opts);
    const double ari = metrics::ari(corpus.labels, tree.leaf_assignment());
    sum += ari;
    minimum = std::min(minimum, ari);
    max_run = std::max(max_run, seconds_since(start));
  }
  const double mean = sum / 10.0;
  const bool pass = mean >= 0.9 && minimum >= 0.8 && max_run < 30.0;
  report(2, "synthetic hierarchy ARI", pass,
         fmt("mean %.3f, min %.3f, slowest run %.1f s", mean, minimum, max_run));
}

// ---- criterion 3: cost equivalence --------------------------------------

void criterion_cost_equivalence() {
  std::mt19937_64 g(303);
  std::uniform_int_distribution<int> d_dist(6, 15), k_dist(2, 5);
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    const Index l = (done % 2 == 0) ? 2 : 3;
    const Index d = d_dist(g), k = k_dist(g);
    if (k < l) continue;
    const TopicModel model = oracle::random_model(d, k, g);
    const MomentStats stats = exact_stats(model);
    const Whitener w = whiten(stats.m2, l);
    const Matrix dmat = oracle::random_rotation(l, g).transpose() * w.e_pinv;
    const SlabSet slabs = project_third_moment(stats, dmat, dmat);
    const double via_slabs = off_diagonal_cost(dmat, slabs);
    const double via_model = geometric_cost(dmat, model);
    worst = std::max(worst, std::abs(via_slabs - via_model) / (1.0 + via_slabs));
    ++done;
  }
  report(3, "off-diagonal vs geometric cost", worst <= 1e-8,
         fmt("max relative gap %.2e over 100 cases", worst));
}

// ---- criterion 4: l=2 rotation optimality --------------------------------

void criterion_rotation_optimality() {
  std::mt19937_64 g(404);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> d_dist(3, 30);
  double worst_gap = -1e300, worst_identity = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    SlabSet slabs;
    const int d = d_dist(g);
    for (int r = 0; r < d; ++r) {
      Matrix h(2, 2);
      const double x = normal(g), y = normal(g), z = normal(g);
      h << x, y, y, z;
      slabs.slabs.push_back(h);
    }
    const QuarticCoefficients c = rotation_objective_coefficients(slabs);
    const RotationSolution sol = solve_rotation_l2(c);
    double dense_min = 1e300;
    for (int i = 0; i <= 1000000; ++i)
      dense_min = std::min(dense_min, rotation_objective(-1.0 + 2.0 * i / 1000000.0, c));
    worst_gap = std::max(worst_gap, sol.f_min - dense_min);
    // cost^2 = 4 F(a*) with the rotated slabs
    double cost01 = 0.0, cost10 = 0.0;
    for (const Matrix& h : slabs.slabs) {
      const Matrix gmat = sol.rotation.transpose() * h * sol.rotation;
      cost01 += gmat(0, 1) * gmat(0, 1);
      cost10 += gmat(1, 0) * gmat(1, 0);
    }
    const double full_cost = std::sqrt(cost01) + std::sqrt(cost10);
    worst_identity =
        std::max(worst_identity, std::abs(full_cost * full_cost - 4.0 * sol.f_min));
  }
  const bool pass = worst_gap <= 1e-9 && worst_identity <= 1e-10;
  report(4, "rotation grid optimality", pass,
         fmt("max gap to dense grid %.2e, max |cost^2-4F| %.2e", worst_gap, worst_identity));
}

// ---- criterion 5: odeco counterexample ----------------------------------

void criterion_counterexample() {
  using linalg::Tensor3;
  const Tensor3 t = linalg::odeco_counterexample();
  const double s3 = std::sqrt(3.0);
  const double a = (1.0 + s3) / (2.0 * std::sqrt(9.0 + 5.0 * s3));
  const double b = (2.0 + s3) / std::sqrt(9.0 + 5.0 * s3);
  double entry_err = std::abs(t(0, 0, 0) - (2 * a * a * a + b * b * b));
  entry_err = std::max({entry_err, std::abs(t(0, 1, 1) - a), std::abs(t(1, 0, 1) - a),
                        std::abs(t(1, 1, 0) - a), std::abs(t(0, 1, 0)), std::abs(t(0, 0, 1)),
                        std::abs(t(1, 1, 1)), std::abs(t(1, 0, 0))});
  const bool not_odeco = !linalg::is_odeco_2x2x2(t, 1e-10);

  TopicModel model;
  model.word_dists.resize(3, 3);
  model.word_dists << 1, 0, 1, 0, 1, 1, 0, 0, 1;
  model.weights = Vector::Ones(3);
  auto [m1, m2, m3] = exact_moments(model, false);
  const auto svd = linalg::truncated_svd(m2, 2);
  const Matrix e_pinv = svd.s.cwiseSqrt().cwiseInverse().asDiagonal() * svd.u.transpose();
  Tensor3 whitened(2, 2, 2);
  for (Index h = 0; h < 3; ++h) {
    const Vector v = e_pinv * model.word_dists.col(h);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        for (Index k = 0; k < 2; ++k) whitened(i, j, k) += v(i) * v(j) * v(k);
  }
  double whiten_err = 1e300;
  for (double s1 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0}) {
      const double sign[2] = {s1, s2};
      double diff = 0.0;
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
          for (Index k = 0; k < 2; ++k)
            diff = std::max(diff, std::abs(sign[i] * sign[j] * sign[k] * whitened(i, j, k) -
                                           t(i, j, k)));
      whiten_err = std::min(whiten_err, diff);
    }
  const bool pass = entry_err <= 1e-12 && not_odeco && whiten_err <= 1e-10;
  report(5, "whitened counterexample tensor", pass,
         fmt("closed-form err %.2e, whitening err %.2e, odeco=false", entry_err, whiten_err));
}

// ---- criterion 6: feasibility certificate --------------------------------

void criterion_feasibility() {
  std::mt19937_64 g(606);
  int wrong = 0;
  double worst_span = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const TopicModel model = oracle::random_model(8, 4, g);
    const MomentStats stats = exact_stats(model);
    const Whitener w = whiten(stats.m2, 2);
    const Matrix o = oracle::random_rotation(2, g);
    const Matrix member = o.transpose() * w.e_pinv;
    if (!is_feasible(member, w, 1e-6)) ++wrong;
    // item-3 style non-member: pseudo-inverse of two permuted factor columns
    std::vector<Index> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), g);
    Matrix truncated(8, 2);
    for (Index c = 0; c < 2; ++c)
      truncated.col(c) =
          model.word_dists.col(perm[size_t(c)]) * std::sqrt(model.weights(perm[size_t(c)]));
    if (is_feasible(linalg::pseudo_inverse(truncated), w, 1e-6)) ++wrong;
    if (is_feasible(2.0 * member, w, 1e-6)) ++wrong;

    const RecoveredModel rec =
        extract_parameters(Diagonalizer::from_rotation(w, o), stats.m1, false);
    const Matrix basis = w.e;
    const Matrix proj =
        basis * (basis.transpose() * basis).ldlt().solve(basis.transpose() * rec.centers);
    for (Index c = 0; c < 2; ++c)
      if (rec.weights(c) > 0.0)
        worst_span = std::max(
            worst_span, (rec.centers.col(c) - proj.col(c)).norm() / (1.0 + rec.centers.col(c).norm()));
  }
  const bool pass = wrong == 0 && worst_span <= 1e-8;
  report(6, "feasible-set certificate", pass,
         fmt("misclassified %d of 300, max span residual %.2e", double(wrong), worst_span));
}

// ---- criterion 7: orthogonal top-2 recovery ------------------------------

void criterion_orthogonal_top2() {
  TopicModel model;
  model.word_dists = Matrix::Zero(12, 4);
  for (Index t = 0; t < 4; ++t)
    for (Index w = t * 3; w < (t + 1) * 3; ++w) model.word_dists(w, t) = 1.0 / 3.0;
  model.weights = Vector(4);
  model.weights << 0.4, 0.3, 0.2, 0.1;
  const RecoveredModel rec = decompose(exact_stats(model), 2);
  double worst = 1.0;
  for (Index i = 0; i < 2; ++i) {
    double best = 0.0;
    for (Index t = 0; t < 2; ++t) {
      const double cosine = std::abs(rec.centers.col(i).dot(model.word_dists.col(t))) /
                            (rec.centers.col(i).norm() * model.word_dists.col(t).norm());
      best = std::max(best, cosine);
    }
    worst = std::min(worst, best);
  }
  report(7, "orthogonal-topics top-2 recovery", worst >= 0.99,
         fmt("min best-cosine %.4f", worst));
}

// ---- criterion 8: estimator correctness and performance ------------------

void criterion_estimators() {
  // slab projections vs dense enumeration on several fixtures with d <= 20
  std::mt19937_64 g(808);
  double worst_slab = 0.0;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    const TopicModel model = oracle::random_model(14 + Index(seed), 3, g);
    auto corpus = std::make_shared<Corpus>(synth::sample_corpus(model, 40, 8, seed));
    for (Estimator est : {Estimator::counts, Estimator::triples}) {
      const MomentStats stats = estimate_moments(std::make_shared<Corpus>(*corpus), {est, false, 1});
      const oracle::DenseMoments dense = oracle::brute_force_moments(*corpus, est);
      std::normal_distribution<double> normal;
      Matrix a(3, corpus->vocab_size), b(2, corpus->vocab_size);
      for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) a(i, j) = normal(g);
      for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) b(i, j) = normal(g);
      const SlabSet slabs = project_third_moment(stats, a, b);
      for (Index r = 0; r < corpus->vocab_size; ++r)
        worst_slab = std::max(worst_slab, (slabs.slabs[size_t(r)] -
                                           oracle::dense_slab(dense.m3, a, b, r))
                                              .cwiseAbs()
                                              .maxCoeff());
    }
  }

  // unbiasedness at 3 standard errors (200 corpora x 5000 docs)
  TopicModel model;
  model.word_dists.resize(5, 2);
  model.word_dists << 0.4, 0.1, 0.3, 0.1, 0.1, 0.2, 0.1, 0.2, 0.1, 0.4;
  model.weights = Vector(2);
  model.weights << 0.6, 0.4;
  auto [m1, m2, m3] = exact_moments(model);
  Matrix mean = Matrix::Zero(5, 5), second = Matrix::Zero(5, 5);
  const int corpora = 200;
  for (int rep = 0; rep < corpora; ++rep) {
    const Corpus corpus = synth::sample_corpus(model, 5000, 6, 5000 + uint64_t(rep));
    const MomentStats stats = estimate_moments_counts(std::make_shared<Corpus>(corpus));
    mean += stats.m2;
    second += stats.m2.cwiseProduct(stats.m2);
  }
  mean /= corpora;
  second /= corpora;
  bool unbiased = true;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) {
      const double se =
          std::sqrt(std::max(0.0, second(i, j) - mean(i, j) * mean(i, j)) / corpora);
      if (std::abs(mean(i, j) - m2(i, j)) > 3.0 * se + 1e-12) unbiased = false;
    }

  // performance smoke: depth-4 tree on n=1e4, d=3000, T=100 in under 300 s
  const auto start = std::chrono::steady_clock::now();
  const TopicModel big = synth::gen_hier_model(4, 3000);
  const Corpus corpus = synth::sample_corpus(big, 10000, 100, 1);
  hier::TreeOptions opts;
  opts.max_depth = 4;
  opts.n_threads = 4;
  opts.parallel = true;
  const hier::ClusterTree tree = hier::build_tree(corpus, opts);
  const double elapsed = seconds_since(start);
  const double ari = metrics::ari(corpus.labels, tree.leaf_assignment());

  const bool pass = worst_slab <= 1e-12 && unbiased && elapsed < 300.0;
  report(8, "estimator correctness and speed", pass,
         fmt("max slab err %.2e, depth-4 tree %.0f s (ari %.2f)", worst_slab, elapsed, ari));
}

}  // namespace

int main() {
  criterion_realizable_recovery();
  criterion_hierarchy_reproduction();
  criterion_cost_equivalence();
  criterion_rotation_optimality();
  criterion_counterexample();
  criterion_feasibility();
  criterion_orthogonal_top2();
  criterion_estimators();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
