#include "sidiwo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace sidiwo::metrics {

double ari(std::span<const int32_t> labels_a, std::span<const int32_t> labels_b) {
  if (labels_a.size() != labels_b.size())
    fail(ErrorCode::length_mismatch, "labelings have " + std::to_string(labels_a.size()) +
                                         " and " + std::to_string(labels_b.size()) + " items");
  const int64_t n = static_cast<int64_t>(labels_a.size());
  if (n < 2) return 1.0;

  std::map<std::pair<int32_t, int32_t>, int64_t> cells;
  std::map<int32_t, int64_t> rows, cols;
  for (int64_t i = 0; i < n; ++i) {
    ++cells[{labels_a[static_cast<size_t>(i)], labels_b[static_cast<size_t>(i)]}];
    ++rows[labels_a[static_cast<size_t>(i)]];
    ++cols[labels_b[static_cast<size_t>(i)]];
  }
  auto choose2 = [](int64_t m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); };
  double sum_cells = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [key, v] : cells) sum_cells += choose2(v);
  for (const auto& [key, v] : rows) sum_rows += choose2(v);
  for (const auto& [key, v] : cols) sum_cols += choose2(v);
  const double expected = sum_rows * sum_cols / choose2(n);
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / (maximum - expected);
}

namespace {

// Augmenting-path bipartite matching restricted to edges with cost below
// a threshold.
bool perfect_matching_under(const Matrix& cost, double threshold, std::vector<int>& match_of_b) {
  const int k = static_cast<int>(cost.rows());
  match_of_b.assign(static_cast<size_t>(k), -1);
  std::vector<char> visited;
  std::function<bool(int)> try_assign = [&](int a) -> bool {
    for (int b = 0; b < k; ++b) {
      if (visited[static_cast<size_t>(b)] || cost(a, b) > threshold) continue;
      visited[static_cast<size_t>(b)] = 1;
      if (match_of_b[static_cast<size_t>(b)] < 0 || try_assign(match_of_b[static_cast<size_t>(b)])) {
        match_of_b[static_cast<size_t>(b)] = a;
        return true;
      }
    }
    return false;
  };
  for (int a = 0; a < k; ++a) {
    visited.assign(static_cast<size_t>(k), 0);
    if (!try_assign(a)) return false;
  }
  return true;
}

}  // namespace

ColumnMatch match_columns(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::shape_mismatch, "matrices must have equal shapes");
  const int k = static_cast<int>(a.cols());
  if (k > 12) fail(ErrorCode::shape_mismatch, "column matching supports at most 12 columns");

  Matrix cost(k, k);
  std::vector<double> thresholds;
  thresholds.reserve(static_cast<size_t>(k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      cost(i, j) = (a.col(i) - b.col(j)).norm();
      thresholds.push_back(cost(i, j));
    }
  std::sort(thresholds.begin(), thresholds.end());

  // Smallest threshold admitting a perfect matching.
  std::vector<int> match_of_b;
  size_t lo = 0, hi = thresholds.size() - 1;
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (perfect_matching_under(cost, thresholds[mid], match_of_b))
      hi = mid;
    else
      lo = mid + 1;
  }
  perfect_matching_under(cost, thresholds[lo], match_of_b);

  ColumnMatch out;
  out.permutation.assign(static_cast<size_t>(k), -1);
  for (int bcol = 0; bcol < k; ++bcol) out.permutation[static_cast<size_t>(match_of_b[static_cast<size_t>(bcol)])] = bcol;
  out.max_error = 0.0;
  for (int i = 0; i < k; ++i)
    out.max_error = std::max(out.max_error, cost(i, out.permutation[static_cast<size_t>(i)]));
  return out;
}

double purity(std::span<const int32_t> labels, std::span<const int64_t> doc_ids) {
  if (doc_ids.empty()) return 1.0;
  std::map<int32_t, int64_t> histogram;
  for (int64_t id : doc_ids) ++histogram[labels[static_cast<size_t>(id)]];
  int64_t best = 0;
  for (const auto& [label, count] : histogram) best = std::max(best, count);
  return static_cast<double>(best) / static_cast<double>(doc_ids.size());
}

}  // namespace sidiwo::metrics
