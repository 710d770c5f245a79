#pragma once

#include <vector>

#include "ucoot/types.hpp"

namespace ucoot {

/// Integer class labels over the alphabet 0 .. num_classes-1.
struct LabelVector {
  std::vector<int> labels;
  int num_classes = 0;

  LabelVector() = default;
  LabelVector(std::vector<int> labels_in, int num_classes_in);

  /// Infers num_classes as max label + 1.
  static LabelVector from_labels(std::vector<int> labels_in);

  Index size() const { return static_cast<Index>(labels.size()); }
};

struct BarycentricResult {
  Matrix mapped;                       // n_s x d_t
  std::vector<Index> zero_mass_rows;   // rows emitted as zeros, not NaN
};

/// Plan-weighted averages of target rows: diag(1 / P1) P X_t. Rows of the
/// plan with zero mass produce flagged all-zero output rows.
BarycentricResult barycentric_map(const Matrix& plan, const Matrix& target_values);

struct LabelPropagation {
  LabelVector labels;                  // predicted target labels
  Matrix proportions;                  // K x n_t transported class mass
  std::vector<Index> zero_mass_cols;   // columns labeled 0 by fallback
};

/// Transported class proportions L = D P (one-hot source labels against the
/// plan); predictions are argmax per column with ties broken toward the
/// smallest class index.
LabelPropagation label_propagate(const Matrix& plan, const LabelVector& source_labels);

struct BlockDiagAccuracy {
  double value = 0.0;
  bool zero_mass = false;
};

/// Fraction of plan mass on cells whose row and column labels agree.
BlockDiagAccuracy block_diag_accuracy(const Matrix& plan, const LabelVector& labels1,
                                      const LabelVector& labels2);

/// Fraction of samples closer than the true match, averaged over both
/// directions. Row i of the aligned matrix corresponds to row i of the
/// reference; distances are Euclidean; strictly-closer comparisons, so ties
/// do not count against. Lower is better; needs n >= 2.
double foscttm(const Matrix& x1_aligned, const Matrix& x2);

/// Total variation between empirical class proportions:
/// (1/2) sum_k |p_a(k) - p_b(k)|.
double class_marginal_tv(const LabelVector& labels_a, const LabelVector& labels_b);

}  // namespace ucoot
