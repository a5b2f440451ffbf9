#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sidiwo/decompose.hpp"

namespace sidiwo::hier {

/// Euclidean projection onto the probability simplex (sort-and-threshold).
Vector project_simplex(const Vector& v);

/// The two simplex-projected pseudo-centers of a binary split, ordered so
/// that p1 carries the larger recovered weight.
struct PseudoCenterPair {
  Vector p1;
  Vector p2;
  Eigen::Vector2d weights;
  RecoveredModel source;
};

/// Multinomial maximum-likelihood assignment of a document to one of the
/// two centers: argmax_j sum_w count_w * log(p_j(w) + smoothing), ties
/// toward cluster 1. No prior term by default; `use_prior` adds
/// log(weight_j) for experimentation.
int map_assign(const Document& doc, const PseudoCenterPair& centers, double smoothing = 1e-10,
               bool use_prior = false);

struct SplitOptions {
  Estimator estimator = Estimator::counts;
  bool allow_short_docs = false;
  int min_split_size = 20;
  int grid_size = 10000;
  int refine_iters = 3;
  double smoothing = 1e-10;
  bool map_prior = false;
  double rank_tolerance = 1e-10;
  int n_threads = 1;
};

struct SplitResult {
  std::vector<int64_t> left;
  std::vector<int64_t> right;
  PseudoCenterPair centers;
};

/// One divisive step: re-estimate moments on the given documents, recover
/// the two pseudo-centers at l = 2, project them onto the simplex, and
/// MAP-assign every document. Throws RankDeficient when the subset is too
/// homogeneous and DegenerateSplit when one side ends up empty.
SplitResult split_corpus(const Corpus& corpus, std::span<const int64_t> doc_ids,
                         const SplitOptions& opts = {});

struct TreeNode {
  int node_id = 0;
  int depth = 0;
  std::vector<int64_t> doc_ids;
  std::optional<PseudoCenterPair> centers;  // internal nodes only
  std::vector<std::pair<std::string, double>> top_words;
  std::vector<std::string> warnings;  // leaf-conversion notes, not serialized
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  bool is_leaf() const { return left == nullptr; }
};

struct ClusterTree {
  std::unique_ptr<TreeNode> root;
  int64_t n_docs = 0;
  int32_t vocab_size = 0;
  int max_depth = 0;
  double lambda_relevance = 0.7;

  /// Nodes in pre-order (the node_id order).
  std::vector<const TreeNode*> nodes() const;
  std::vector<const TreeNode*> leaves() const;
  /// Per-document leaf index (leaves numbered in pre-order).
  std::vector<int32_t> leaf_assignment() const;
};

struct TreeOptions : SplitOptions {
  int max_depth = 3;
  double lambda_relevance = 0.7;
  int top_words = 10;
  bool parallel = false;
};

/// Recursive divisive clustering. Split failures (rank deficiency, an
/// empty side, short documents) convert the node into a leaf with a
/// warning; they never abort the tree.
ClusterTree build_tree(const Corpus& corpus, const TreeOptions& opts);

/// lambda * log P[w | node] + (1 - lambda) * log(P[w | node] / P[w | corpus])
/// with raw empirical frequencies; -inf when the word is absent from the
/// node (such words are excluded from rankings).
double relevance(int32_t word, const Corpus& corpus, std::span<const int64_t> node_docs,
                 double lambda);

}  // namespace sidiwo::hier
