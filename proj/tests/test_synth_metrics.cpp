#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "sidiwo/metrics.hpp"
#include "sidiwo/moments.hpp"
#include "sidiwo/synth.hpp"
#include "sidiwo/tensor.hpp"
#include "support/oracles.hpp"

using namespace sidiwo;

TEST_CASE("gen_hier_model with one level concentrates on the two halves") {
  const TopicModel model = synth::gen_hier_model(1, 4);
  CHECK(model.n_topics() == 2);
  // topic 0 mass on words {0,1}, topic 1 on {2,3}, plus background
  CHECK(model.word_dists.col(0).head(2).sum() > 0.9);
  CHECK(model.word_dists.col(1).tail(2).sum() > 0.9);
  CHECK(model.word_dists.minCoeff() > 0.0);  // background everywhere
}

TEST_CASE("gen_hier_model structure at three levels") {
  const TopicModel model = synth::gen_hier_model(3, 100);
  CHECK(model.n_topics() == 8);
  model.validate(1e-12);
  for (Index t = 0; t < 4; ++t) {
    // topics 0-3 supported in the first half (beyond the background)
    CHECK(model.word_dists.col(t).head(50).sum() > 0.9);
    CHECK(model.word_dists.col(t).tail(50).sum() < 0.1);
  }
  // sibling topics share their ancestor blocks: same-quarter pairs are
  // more similar than cross-half pairs
  auto cosine = [&](Index a, Index b) {
    return model.word_dists.col(a).dot(model.word_dists.col(b)) /
           (model.word_dists.col(a).norm() * model.word_dists.col(b).norm());
  };
  CHECK(cosine(0, 1) > cosine(0, 2));
  CHECK(cosine(0, 2) > cosine(0, 4));
}

TEST_CASE("gen_hier_model rejects impossible shapes") {
  CHECK_THROWS_WITH_AS(synth::gen_hier_model(3, 4), doctest::Contains("ShapeMismatch"), Error);
  CHECK_THROWS_AS(synth::gen_hier_model(0, 10), Error);
}

TEST_CASE("generator round trip: second moment has rank 8") {
  const TopicModel model = synth::gen_hier_model(3, 100);
  const MomentStats stats = exact_stats(model);
  const auto svd = linalg::truncated_svd(stats.m2, 8);
  CHECK(svd.s(7) / svd.s(0) > 1e-10);
  CHECK_THROWS_AS(linalg::truncated_svd(stats.m2, 9), Error);  // sigma_9 below tolerance
}

TEST_CASE("sample_corpus with a deterministic topic") {
  TopicModel model;
  model.word_dists = Matrix::Zero(3, 1);
  model.word_dists(0, 0) = 1.0;
  model.weights = Vector::Ones(1);
  const Corpus corpus = synth::sample_corpus(model, 10, 7, 42);
  for (const Document& doc : corpus.docs) {
    REQUIRE(doc.counts.size() == 1);
    CHECK(doc.counts[0].first == 0);
    CHECK(doc.counts[0].second == 7);
    CHECK(doc.lead_words[0] == 0);
  }
  CHECK(corpus.labels == std::vector<int32_t>(10, 0));
}

TEST_CASE("sample_corpus is reproducible and seed-sensitive") {
  const TopicModel model = synth::gen_hier_model(2, 20);
  const Corpus a = synth::sample_corpus(model, 50, 10, 7);
  const Corpus b = synth::sample_corpus(model, 50, 10, 7);
  const Corpus c = synth::sample_corpus(model, 50, 10, 8);
  REQUIRE(a.n_docs() == b.n_docs());
  bool all_equal = true, any_diff_c = false;
  for (int64_t i = 0; i < 50; ++i) {
    all_equal = all_equal && a.docs[size_t(i)].counts == b.docs[size_t(i)].counts &&
                a.labels[size_t(i)] == b.labels[size_t(i)];
    any_diff_c = any_diff_c || a.docs[size_t(i)].counts != c.docs[size_t(i)].counts;
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("sampled topic frequencies match the weights") {
  TopicModel model;
  model.word_dists = Matrix::Constant(4, 3, 0.25);
  model.weights = Vector(3);
  model.weights << 0.5, 0.3, 0.2;
  const int64_t n = 20000;
  const Corpus corpus = synth::sample_corpus(model, n, 3, 11);
  Vector freq = Vector::Zero(3);
  for (int32_t label : corpus.labels) freq(label) += 1.0 / static_cast<double>(n);
  for (Index t = 0; t < 3; ++t) {
    const double sigma = std::sqrt(model.weights(t) * (1 - model.weights(t)) / n);
    CHECK(std::abs(freq(t) - model.weights(t)) < 3.0 * sigma + 1e-9);
  }
}

TEST_CASE("ari on worked examples") {
  const std::vector<int32_t> a{0, 0, 1, 1};
  CHECK(metrics::ari(a, a) == doctest::Approx(1.0));
  const std::vector<int32_t> constant{5, 5, 5, 5};
  CHECK(metrics::ari(a, constant) == doctest::Approx(0.0));
  CHECK(metrics::ari(constant, constant) == doctest::Approx(1.0));
  const std::vector<int32_t> b{0, 1, 1, 1};
  CHECK(metrics::ari(a, b) == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(metrics::ari(a, std::vector<int32_t>{0, 1}),
                       doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("ari properties against the pair-counting oracle") {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int32_t> label(0, 4);
  std::uniform_int_distribution<int> size(2, 40);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = size(g);
    std::vector<int32_t> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    for (auto& x : a) x = label(g);
    for (auto& x : b) x = label(g);
    const double ab = metrics::ari(a, b);
    CHECK(ab == doctest::Approx(metrics::ari(b, a)).epsilon(1e-15));
    CHECK(ab == doctest::Approx(oracle::pair_counting_ari(a, b)).epsilon(1e-12));
    // renaming labels leaves the value unchanged
    std::vector<int32_t> renamed(a);
    for (auto& x : renamed) x = 7 - x;
    CHECK(metrics::ari(renamed, b) == doctest::Approx(ab).epsilon(1e-15));
  }
}

TEST_CASE("match_columns identity and reversal") {
  Matrix a(3, 4);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const auto id = metrics::match_columns(a, a);
  CHECK(id.max_error == 0.0);
  CHECK(id.permutation == std::vector<int>{0, 1, 2, 3});
  Matrix rev = a.rowwise().reverse();
  const auto r = metrics::match_columns(a, rev);
  CHECK(r.max_error == 0.0);
  CHECK(r.permutation == std::vector<int>{3, 2, 1, 0});
}

TEST_CASE("match_columns under small noise") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> uniform(-1e-8, 1e-8);
  Matrix a(6, 5);
  std::normal_distribution<double> normal;
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j) a(i, j) = normal(g);
  Matrix b = a;
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j) b(i, j) += uniform(g);
  const auto m = metrics::match_columns(a, b);
  CHECK(m.permutation == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(m.max_error <= 2e-8 * std::sqrt(6.0));
}

TEST_CASE("match_columns minimizes the bottleneck distance") {
  // a case where greedy sum-matching and bottleneck matching differ in
  // cost structure; verify against exhaustive search
  std::mt19937_64 g(13);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 30; ++rep) {
    Matrix a(3, 4), b(3, 4);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j) {
        a(i, j) = normal(g);
        b(i, j) = normal(g);
      }
    const auto m = metrics::match_columns(a, b);
    std::vector<int> perm{0, 1, 2, 3};
    double best = 1e300;
    do {
      double worst = 0.0;
      for (int i = 0; i < 4; ++i)
        worst = std::max(worst, (a.col(i) - b.col(perm[size_t(i)])).norm());
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(m.max_error == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("match_columns validates shapes") {
  CHECK_THROWS_AS(metrics::match_columns(Matrix::Zero(2, 2), Matrix::Zero(3, 2)), Error);
  CHECK_THROWS_AS(metrics::match_columns(Matrix::Zero(2, 13), Matrix::Zero(2, 13)), Error);
}

TEST_CASE("purity of labeled subsets") {
  const std::vector<int32_t> labels{0, 0, 0, 1, 1, 2};
  const std::vector<int64_t> ids{0, 1, 3};
  CHECK(metrics::purity(labels, ids) == doctest::Approx(2.0 / 3.0));
  CHECK(metrics::purity(labels, std::vector<int64_t>{}) == 1.0);
}

TEST_CASE("unbiasedness: estimator means match exact moments within 3 SE") {
  // 200 corpora of 5000 documents from a fixed 2-topic model.
  TopicModel model;
  model.word_dists.resize(5, 2);
  model.word_dists << 0.4, 0.1, 0.3, 0.1, 0.1, 0.2, 0.1, 0.2, 0.1, 0.4;
  model.weights = Vector(2);
  model.weights << 0.6, 0.4;
  auto [m1, m2, m3] = exact_moments(model);

  const int corpora = 200;
  const int64_t docs = 5000;
  Matrix mean = Matrix::Zero(5, 5), moment2 = Matrix::Zero(5, 5);
  for (int rep = 0; rep < corpora; ++rep) {
    const Corpus corpus = synth::sample_corpus(model, docs, 6, 1000 + uint64_t(rep));
    const MomentStats stats = estimate_moments_counts(std::make_shared<Corpus>(corpus));
    mean += stats.m2;
    moment2 += stats.m2.cwiseProduct(stats.m2);
  }
  mean /= corpora;
  moment2 /= corpora;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) {
      const double variance = std::max(0.0, moment2(i, j) - mean(i, j) * mean(i, j));
      const double se = std::sqrt(variance / corpora);
      CHECK(std::abs(mean(i, j) - m2(i, j)) <= 3.0 * se + 1e-12);
    }
}
