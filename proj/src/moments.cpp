#include "sidiwo/moments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace sidiwo {

namespace {

struct PairAccumulator {
  int64_t n = 0;
  Vector m1_sum;
  Matrix m2_upper;  // upper triangle only, mirrored at the end
};

// Ordered pairs of distinct positions among the first three tokens,
// averaged with weight 1/6. Only the token multiset matters. The matrix
// is kept as its upper triangle and mirrored once at the end, so each
// unordered word pair is recorded once (and twice on the diagonal, where
// both orders coincide).
void accumulate_triple(PairAccumulator& acc, const std::array<int32_t, 3>& w) {
  for (int32_t t : w) acc.m1_sum(t) += 1.0 / 3.0;
  for (int p = 0; p < 3; ++p)
    for (int q = p + 1; q < 3; ++q) {
      if (w[p] == w[q]) {
        acc.m2_upper(w[p], w[q]) += 2.0 / 6.0;
      } else {
        acc.m2_upper(std::min(w[p], w[q]), std::max(w[p], w[q])) += 1.0 / 6.0;
      }
    }
  acc.n += 1;
}

// All ordered pairs of distinct positions: (c c^T - diag(c)) / (T(T-1)),
// upper triangle only.
void accumulate_counts(PairAccumulator& acc, const Document& doc) {
  const double t = static_cast<double>(doc.total);
  const double inv1 = 1.0 / t;
  const double inv2 = 1.0 / (t * (t - 1.0));
  for (size_t i = 0; i < doc.counts.size(); ++i) {
    const auto [wi, ci] = doc.counts[i];
    acc.m1_sum(wi) += ci * inv1;
    if (ci > 1) acc.m2_upper(wi, wi) += static_cast<double>(ci) * (ci - 1.0) * inv2;
    for (size_t j = i + 1; j < doc.counts.size(); ++j) {
      const auto [wj, cj] = doc.counts[j];
      acc.m2_upper(wi, wj) += static_cast<double>(ci) * static_cast<double>(cj) * inv2;
    }
  }
  acc.n += 1;
}

std::array<int32_t, 3> triple_view(const Document& doc, int64_t doc_id) {
  if (doc.has_lead_words()) return doc.lead_words;
  if (doc.total < 3)
    fail(ErrorCode::document_too_short,
         "document " + std::to_string(doc_id) + " has fewer than 3 tokens");
  if (doc.total > 3)
    fail(ErrorCode::invalid_argument,
         "document " + std::to_string(doc_id) +
             " has no token order; the triples estimator needs ordered input "
             "(or exactly 3 tokens)");
  std::array<int32_t, 3> w{};
  int k = 0;
  for (auto [word, count] : doc.counts)
    for (int32_t c = 0; c < count; ++c) w[static_cast<size_t>(k++)] = word;
  return w;
}

template <typename PerDoc>
void for_doc_range(const Corpus& corpus, int64_t begin, int64_t end, PerDoc&& fn) {
  for (int64_t i = begin; i < end; ++i) fn(i, corpus.docs[static_cast<size_t>(i)]);
}

// Shards [0, n) into contiguous ranges, runs `work(shard_index, begin, end)`
// on each, serially when only one shard is asked for.
template <typename Work>
void run_sharded(int64_t n, int n_threads, Work&& work) {
  const int shards = std::max(1, std::min<int>(n_threads, static_cast<int>(std::min<int64_t>(n, 64))));
  if (shards == 1) {
    work(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(shards));
  for (int s = 0; s < shards; ++s) {
    const int64_t begin = n * s / shards;
    const int64_t end = n * (s + 1) / shards;
    pool.emplace_back([&work, s, begin, end] { work(s, begin, end); });
  }
  for (auto& th : pool) th.join();
}

int count_shards(int64_t n, int n_threads) {
  return std::max(1, std::min<int>(n_threads, static_cast<int>(std::min<int64_t>(n, 64))));
}

}  // namespace

const char* estimator_name(Estimator e) {
  return e == Estimator::counts ? "counts" : "triples";
}

Estimator estimator_from_name(const std::string& name) {
  if (name == "counts") return Estimator::counts;
  if (name == "triples") return Estimator::triples;
  fail(ErrorCode::invalid_argument, "unknown estimator '" + name + "'");
}

MomentStats estimate_moments(std::shared_ptr<const Corpus> corpus, const MomentOptions& opts) {
  if (!corpus) fail(ErrorCode::invalid_argument, "null corpus");
  corpus->validate();
  const int64_t n = corpus->n_docs();
  if (n == 0) fail(ErrorCode::empty_corpus, "corpus has no documents");
  const Index d = corpus->vocab_size;

  // Validate lengths up front so a parallel run fails on the same document
  // a serial one would.
  for (int64_t i = 0; i < n; ++i) {
    const Document& doc = corpus->docs[static_cast<size_t>(i)];
    if (opts.estimator == Estimator::triples) {
      (void)triple_view(doc, i);
    } else {
      const int64_t min_total = opts.allow_short_docs ? 2 : 3;
      if (doc.total < min_total)
        fail(ErrorCode::document_too_short,
             "document " + std::to_string(i) + " has " + std::to_string(doc.total) +
                 " tokens, need at least " + std::to_string(min_total));
    }
  }

  const int shards = count_shards(n, opts.n_threads);
  std::vector<PairAccumulator> partial(static_cast<size_t>(shards));
  for (auto& acc : partial) {
    acc.m1_sum = Vector::Zero(d);
    acc.m2_upper = Matrix::Zero(d, d);
  }
  run_sharded(n, opts.n_threads, [&](int shard, int64_t begin, int64_t end) {
    PairAccumulator& acc = partial[static_cast<size_t>(shard)];
    for_doc_range(*corpus, begin, end, [&](int64_t id, const Document& doc) {
      if (opts.estimator == Estimator::triples)
        accumulate_triple(acc, triple_view(doc, id));
      else
        accumulate_counts(acc, doc);
    });
  });

  MomentStats stats;
  stats.n_docs = n;
  stats.m1 = Vector::Zero(d);
  Matrix upper = Matrix::Zero(d, d);
  for (const auto& acc : partial) {
    stats.m1 += acc.m1_sum;
    upper += acc.m2_upper;
  }
  stats.m1 /= static_cast<double>(n);
  upper /= static_cast<double>(n);
  stats.m2 = upper.selfadjointView<Eigen::Upper>();
  stats.corpus = std::move(corpus);
  stats.estimator = opts.estimator;
  stats.allow_short_docs = opts.allow_short_docs;
  return stats;
}

MomentStats estimate_moments_triples(std::shared_ptr<const Corpus> corpus, int n_threads) {
  return estimate_moments(std::move(corpus), {Estimator::triples, false, n_threads});
}

MomentStats estimate_moments_counts(std::shared_ptr<const Corpus> corpus, bool allow_short_docs,
                                    int n_threads) {
  return estimate_moments(std::move(corpus), {Estimator::counts, allow_short_docs, n_threads});
}

MomentStats exact_stats(const TopicModel& model, bool require_normalized) {
  model.validate(1e-8, require_normalized);
  MomentStats stats;
  stats.n_docs = 0;
  stats.m1 = model.word_dists * model.weights;
  stats.m2 = model.word_dists * model.weights.asDiagonal() * model.word_dists.transpose();
  stats.exact_model = std::make_shared<TopicModel>(model);
  return stats;
}

std::tuple<Vector, Matrix, linalg::Tensor3> exact_moments(const TopicModel& model,
                                                          bool require_normalized) {
  model.validate(1e-8, require_normalized);
  Vector m1 = model.word_dists * model.weights;
  Matrix m2 = model.word_dists * model.weights.asDiagonal() * model.word_dists.transpose();
  linalg::Tensor3 m3 = linalg::Tensor3::symmetric_rank_k(model.word_dists, model.weights);
  return {std::move(m1), std::move(m2), std::move(m3)};
}

namespace {

using SlabVec = std::vector<Matrix>;

void project_triple_doc(SlabVec& slabs, const Matrix& left, const Matrix& right,
                        const std::array<int32_t, 3>& w) {
  // One sixth per ordered triple of distinct positions; middle position
  // selects the slab.
  static constexpr int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                     {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& p : perm) {
    const int32_t u = w[static_cast<size_t>(p[0])];
    const int32_t v = w[static_cast<size_t>(p[1])];
    const int32_t x = w[static_cast<size_t>(p[2])];
    slabs[static_cast<size_t>(v)].noalias() += (1.0 / 6.0) * left.col(u) * right.col(x).transpose();
  }
}

void project_count_doc(SlabVec& slabs, const Matrix& left, const Matrix& right,
                       const Document& doc, int64_t doc_id) {
  if (doc.total < 3)
    fail(ErrorCode::document_too_short,
         "document " + std::to_string(doc_id) + " has fewer than 3 tokens");
  const double t = static_cast<double>(doc.total);
  const double scale = 1.0 / (t * (t - 1.0) * (t - 2.0));

  const Index l1 = left.rows();
  const Index l2 = right.rows();
  Vector lc = Vector::Zero(l1);   // left * c
  Vector rc = Vector::Zero(l2);   // right * c
  Matrix k = Matrix::Zero(l1, l2);  // left * diag(c) * right^T
  for (auto [w, c] : doc.counts) {
    lc.noalias() += static_cast<double>(c) * left.col(w);
    rc.noalias() += static_cast<double>(c) * right.col(w);
    k.noalias() += static_cast<double>(c) * left.col(w) * right.col(w).transpose();
  }
  // Ordered distinct-position triples by inclusion-exclusion:
  //   c⊗c⊗c - three coincidence terms + 2 superdiag(c),
  // contracted on modes 1 and 3, indexed by the mode-2 word r.
  for (auto [r, cr] : doc.counts) {
    const double c = static_cast<double>(cr);
    slabs[static_cast<size_t>(r)].noalias() +=
        (c * scale) * (lc * rc.transpose() - left.col(r) * rc.transpose() - k -
                       lc * right.col(r).transpose() +
                       2.0 * left.col(r) * right.col(r).transpose());
  }
}

}  // namespace

SlabSet project_third_moment(const MomentStats& stats, const Matrix& left, const Matrix& right,
                             int n_threads) {
  if (!stats.replayable())
    fail(ErrorCode::invalid_argument, "moment stats carry no third-moment source");
  const Index d = stats.vocab_size();
  if (left.cols() != d || right.cols() != d)
    fail(ErrorCode::shape_mismatch, "projection matrices must have vocab_size columns");

  SlabSet out;
  out.left_proj = left;
  out.right_proj = right;
  const Index l1 = left.rows();
  const Index l2 = right.rows();
  out.slabs.assign(static_cast<size_t>(d), Matrix::Zero(l1, l2));

  if (stats.exact_model) {
    // M3_r = sum_h w_h mu_h(r) mu_h ⊗ mu_h, so each slab is a weighted sum
    // of projected rank-one terms.
    const TopicModel& model = *stats.exact_model;
    const Matrix lp = left * model.word_dists;    // l1 x k
    const Matrix rp = right * model.word_dists;   // l2 x k
    for (Index h = 0; h < model.n_topics(); ++h) {
      const Matrix outer = model.weights(h) * lp.col(h) * rp.col(h).transpose();
      for (Index r = 0; r < d; ++r) {
        const double m = model.word_dists(r, h);
        if (m != 0.0) out.slabs[static_cast<size_t>(r)].noalias() += m * outer;
      }
    }
    return out;
  }

  const Corpus& corpus = *stats.corpus;
  const int64_t n = corpus.n_docs();
  if (n == 0) fail(ErrorCode::empty_corpus, "corpus has no documents");

  const int shards = count_shards(n, n_threads);
  std::vector<SlabVec> partial(static_cast<size_t>(shards));
  std::vector<std::exception_ptr> shard_errors(static_cast<size_t>(shards));
  for (auto& sv : partial) sv.assign(static_cast<size_t>(d), Matrix::Zero(l1, l2));
  run_sharded(n, n_threads, [&](int shard, int64_t begin, int64_t end) {
    SlabVec& sv = partial[static_cast<size_t>(shard)];
    try {
      for_doc_range(corpus, begin, end, [&](int64_t id, const Document& doc) {
        if (stats.estimator == Estimator::triples)
          project_triple_doc(sv, left, right, triple_view(doc, id));
        else
          project_count_doc(sv, left, right, doc, id);
      });
    } catch (...) {
      shard_errors[static_cast<size_t>(shard)] = std::current_exception();
    }
  });
  for (const auto& err : shard_errors)
    if (err) std::rethrow_exception(err);

  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index r = 0; r < d; ++r) {
    for (const auto& sv : partial) out.slabs[static_cast<size_t>(r)] += sv[static_cast<size_t>(r)];
    out.slabs[static_cast<size_t>(r)] *= inv_n;
  }
  return out;
}

}  // namespace sidiwo
