#include "sidiwo/hier.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

namespace sidiwo::hier {

namespace {

std::string word_token(const Corpus& corpus, int32_t word) {
  if (!corpus.vocab.empty()) return corpus.vocab[static_cast<size_t>(word)];
  return "w" + std::to_string(word);
}

// Relevance ranking from precomputed totals; ties break toward the lower
// word id so runs are reproducible.
std::vector<std::pair<std::string, double>> rank_words(const Corpus& corpus,
                                                       const std::vector<int64_t>& node_totals,
                                                       const std::vector<int64_t>& corpus_totals,
                                                       double lambda, int top_k) {
  const double node_sum =
      static_cast<double>(std::accumulate(node_totals.begin(), node_totals.end(), int64_t{0}));
  const double corpus_sum =
      static_cast<double>(std::accumulate(corpus_totals.begin(), corpus_totals.end(), int64_t{0}));
  std::vector<std::pair<int32_t, double>> scored;
  for (int32_t w = 0; w < corpus.vocab_size; ++w) {
    const int64_t c = node_totals[static_cast<size_t>(w)];
    if (c == 0) continue;  // -inf relevance, excluded
    const double p_node = static_cast<double>(c) / node_sum;
    const double p_corpus = static_cast<double>(corpus_totals[static_cast<size_t>(w)]) / corpus_sum;
    const double r = lambda * std::log(p_node) + (1.0 - lambda) * std::log(p_node / p_corpus);
    scored.emplace_back(w, r);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(scored.size()) > top_k) scored.resize(static_cast<size_t>(top_k));
  std::vector<std::pair<std::string, double>> out;
  out.reserve(scored.size());
  for (auto [w, r] : scored) out.emplace_back(word_token(corpus, w), r);
  return out;
}

bool is_leaf_conversion_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::rank_deficient:
    case ErrorCode::degenerate_split:
    case ErrorCode::degenerate_weight:
    case ErrorCode::document_too_short:
    case ErrorCode::empty_document:
    case ErrorCode::eig_gap_too_small:
    case ErrorCode::not_symmetric:
    case ErrorCode::domain_error:
      return true;
    default:
      return false;
  }
}

void collect_pre_order(const TreeNode* node, std::vector<const TreeNode*>& out) {
  if (node == nullptr) return;
  out.push_back(node);
  collect_pre_order(node->left.get(), out);
  collect_pre_order(node->right.get(), out);
}

void number_pre_order(TreeNode* node, int& next_id) {
  if (node == nullptr) return;
  node->node_id = next_id++;
  number_pre_order(node->left.get(), next_id);
  number_pre_order(node->right.get(), next_id);
}

}  // namespace

Vector project_simplex(const Vector& v) {
  const Index d = v.size();
  if (d == 0) fail(ErrorCode::invalid_argument, "cannot project an empty vector");
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  for (int j = 0; j < d; ++j) {
    cumsum += u[static_cast<size_t>(j)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  Vector p = (v.array() - theta).max(0.0);
  const double total = p.sum();
  if (total > 0.0) p /= total;  // absorb rounding residual, typically ~1e-16
  return p;
}

int map_assign(const Document& doc, const PseudoCenterPair& centers, double smoothing,
               bool use_prior) {
  if (doc.total <= 0) fail(ErrorCode::empty_document, "cannot assign an empty document");
  if (!(smoothing > 0.0)) fail(ErrorCode::invalid_argument, "smoothing must be positive");
  double ll1 = use_prior ? std::log(centers.weights(0) + smoothing) : 0.0;
  double ll2 = use_prior ? std::log(centers.weights(1) + smoothing) : 0.0;
  for (auto [w, c] : doc.counts) {
    ll1 += c * std::log(centers.p1(w) + smoothing);
    ll2 += c * std::log(centers.p2(w) + smoothing);
  }
  return ll1 >= ll2 ? 1 : 2;
}

SplitResult split_corpus(const Corpus& corpus, std::span<const int64_t> doc_ids,
                         const SplitOptions& opts) {
  if (static_cast<int>(doc_ids.size()) < opts.min_split_size)
    fail(ErrorCode::invalid_argument,
         "subset has " + std::to_string(doc_ids.size()) + " documents, need at least " +
             std::to_string(opts.min_split_size));

  auto subset = std::make_shared<Corpus>(corpus.subset(doc_ids));
  MomentStats stats =
      estimate_moments(subset, {opts.estimator, opts.allow_short_docs, opts.n_threads});

  DecomposeOptions dopts;
  dopts.grid_size = opts.grid_size;
  dopts.refine_iters = opts.refine_iters;
  dopts.project_to_simplex = true;
  dopts.n_threads = opts.n_threads;
  dopts.rank_tolerance = opts.rank_tolerance;
  RecoveredModel model = decompose(stats, 2, dopts);

  SplitResult res;
  res.centers.p1 = model.centers.col(0);
  res.centers.p2 = model.centers.col(1);
  res.centers.weights = Eigen::Vector2d(model.weights(0), model.weights(1));
  res.centers.source = std::move(model);

  for (int64_t id : doc_ids) {
    const int side = map_assign(corpus.docs[static_cast<size_t>(id)], res.centers, opts.smoothing,
                                opts.map_prior);
    (side == 1 ? res.left : res.right).push_back(id);
  }
  if (res.left.empty() || res.right.empty())
    fail(ErrorCode::degenerate_split, "all documents were assigned to one pseudo-center");
  return res;
}

namespace {

void build_node(TreeNode& node, const Corpus& corpus, const std::vector<int64_t>& corpus_totals_v,
                const TreeOptions& opts) {
  const std::vector<int64_t> node_totals = corpus.word_totals(node.doc_ids);
  node.top_words = rank_words(corpus, node_totals, corpus_totals_v, opts.lambda_relevance,
                              opts.top_words);

  if (node.depth >= opts.max_depth) return;
  if (static_cast<int>(node.doc_ids.size()) < opts.min_split_size) return;

  SplitResult split;
  try {
    split = split_corpus(corpus, node.doc_ids, opts);
  } catch (const Error& e) {
    if (is_leaf_conversion_error(e)) {
      node.warnings.push_back(e.what());
      return;
    }
    throw;
  }
  node.centers = std::move(split.centers);
  node.left = std::make_unique<TreeNode>();
  node.right = std::make_unique<TreeNode>();
  node.left->depth = node.depth + 1;
  node.right->depth = node.depth + 1;
  node.left->doc_ids = std::move(split.left);
  node.right->doc_ids = std::move(split.right);

  if (opts.parallel && node.depth < 2) {
    auto future = std::async(std::launch::async, [&] {
      build_node(*node.left, corpus, corpus_totals_v, opts);
    });
    build_node(*node.right, corpus, corpus_totals_v, opts);
    future.get();
  } else {
    build_node(*node.left, corpus, corpus_totals_v, opts);
    build_node(*node.right, corpus, corpus_totals_v, opts);
  }
}

}  // namespace

ClusterTree build_tree(const Corpus& corpus, const TreeOptions& opts) {
  if (opts.max_depth < 1) fail(ErrorCode::invalid_argument, "max_depth must be at least 1");
  corpus.validate();
  if (corpus.n_docs() == 0) fail(ErrorCode::empty_corpus, "corpus has no documents");

  ClusterTree tree;
  tree.n_docs = corpus.n_docs();
  tree.vocab_size = corpus.vocab_size;
  tree.max_depth = opts.max_depth;
  tree.lambda_relevance = opts.lambda_relevance;
  tree.root = std::make_unique<TreeNode>();
  tree.root->depth = 0;
  tree.root->doc_ids.resize(static_cast<size_t>(corpus.n_docs()));
  std::iota(tree.root->doc_ids.begin(), tree.root->doc_ids.end(), int64_t{0});

  const std::vector<int64_t> corpus_totals = corpus.word_totals();
  build_node(*tree.root, corpus, corpus_totals, opts);

  int next_id = 0;
  number_pre_order(tree.root.get(), next_id);
  return tree;
}

std::vector<const TreeNode*> ClusterTree::nodes() const {
  std::vector<const TreeNode*> out;
  collect_pre_order(root.get(), out);
  return out;
}

std::vector<const TreeNode*> ClusterTree::leaves() const {
  std::vector<const TreeNode*> out;
  for (const TreeNode* n : nodes())
    if (n->is_leaf()) out.push_back(n);
  return out;
}

std::vector<int32_t> ClusterTree::leaf_assignment() const {
  std::vector<int32_t> assignment(static_cast<size_t>(n_docs), -1);
  int32_t leaf_idx = 0;
  for (const TreeNode* leaf : leaves()) {
    for (int64_t id : leaf->doc_ids) assignment.at(static_cast<size_t>(id)) = leaf_idx;
    ++leaf_idx;
  }
  return assignment;
}

double relevance(int32_t word, const Corpus& corpus, std::span<const int64_t> node_docs,
                 double lambda) {
  if (word < 0 || word >= corpus.vocab_size)
    fail(ErrorCode::invalid_argument, "word id out of range");
  if (lambda < 0.0 || lambda > 1.0)
    fail(ErrorCode::invalid_argument, "lambda must lie in [0, 1]");
  const std::vector<int64_t> node_totals = corpus.word_totals(node_docs);
  const std::vector<int64_t> corpus_totals = corpus.word_totals();
  const int64_t c = node_totals[static_cast<size_t>(word)];
  if (c == 0) return -std::numeric_limits<double>::infinity();
  const double node_sum =
      static_cast<double>(std::accumulate(node_totals.begin(), node_totals.end(), int64_t{0}));
  const double corpus_sum =
      static_cast<double>(std::accumulate(corpus_totals.begin(), corpus_totals.end(), int64_t{0}));
  const double p_node = static_cast<double>(c) / node_sum;
  const double p_corpus =
      static_cast<double>(corpus_totals[static_cast<size_t>(word)]) / corpus_sum;
  return lambda * std::log(p_node) + (1.0 - lambda) * std::log(p_node / p_corpus);
}

}  // namespace sidiwo::hier
