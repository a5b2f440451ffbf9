#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sidiwo/tensor.hpp"

namespace sidiwo::metrics {

/// Adjusted Rand Index between two labelings of the same items, from the
/// contingency table with the permutation-model chance correction.
/// Returns 1 when both partitions are trivial and identical in structure
/// (the degenerate 0/0 case).
double ari(std::span<const int32_t> labels_a, std::span<const int32_t> labels_b);

struct ColumnMatch {
  std::vector<int> permutation;  // column i of a pairs with permutation[i] of b
  double max_error;              // max_i || a_i - b_perm(i) ||_2
};

/// Bottleneck column matching: the permutation minimizing the largest
/// per-pair distance. Supports up to 12 columns.
ColumnMatch match_columns(const Matrix& a, const Matrix& b);

/// Fraction of the majority label among the given documents.
double purity(std::span<const int32_t> labels, std::span<const int64_t> doc_ids);

}  // namespace sidiwo::metrics
