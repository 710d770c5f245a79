#include "ucoot/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace ucoot {

LabelVector::LabelVector(std::vector<int> labels_in, int num_classes_in)
    : labels(std::move(labels_in)), num_classes(num_classes_in) {
  if (num_classes <= 0) throw ConfigError("label vector needs at least one class");
  for (int label : labels) {
    if (label < 0 || label >= num_classes) {
      throw ConfigError("label " + std::to_string(label) + " outside [0, " +
                        std::to_string(num_classes) + ")");
    }
  }
}

LabelVector LabelVector::from_labels(std::vector<int> labels_in) {
  if (labels_in.empty()) throw ConfigError("label vector must be nonempty");
  const int max_label = *std::max_element(labels_in.begin(), labels_in.end());
  return LabelVector(std::move(labels_in), max_label + 1);
}

BarycentricResult barycentric_map(const Matrix& plan, const Matrix& target_values) {
  if (plan.cols() != target_values.rows()) {
    throw DimensionError("barycentric_map: plan has " + std::to_string(plan.cols()) +
                         " columns but target has " + std::to_string(target_values.rows()) +
                         " rows");
  }
  if (plan.minCoeff() < 0.0) throw ConfigError("barycentric_map: plan must be nonnegative");

  BarycentricResult result;
  result.mapped = Matrix::Zero(plan.rows(), target_values.cols());
  for (Index i = 0; i < plan.rows(); ++i) {
    const double row_mass = plan.row(i).sum();
    if (row_mass <= 0.0) {
      result.zero_mass_rows.push_back(i);
      continue;
    }
    result.mapped.row(i) = (plan.row(i) * target_values) / row_mass;
  }
  return result;
}

LabelPropagation label_propagate(const Matrix& plan, const LabelVector& source_labels) {
  if (source_labels.size() != plan.rows()) {
    throw DimensionError("label_propagate: label count does not match plan rows");
  }
  if (plan.minCoeff() < 0.0) throw ConfigError("label_propagate: plan must be nonnegative");

  const int k = source_labels.num_classes;
  LabelPropagation result;
  result.proportions = Matrix::Zero(k, plan.cols());
  for (Index i = 0; i < plan.rows(); ++i) {
    result.proportions.row(source_labels.labels[static_cast<std::size_t>(i)]) += plan.row(i);
  }

  std::vector<int> predicted(static_cast<std::size_t>(plan.cols()), 0);
  for (Index j = 0; j < plan.cols(); ++j) {
    // argmax with ties toward the smallest class index
    int best = 0;
    double best_mass = result.proportions(0, j);
    for (int c = 1; c < k; ++c) {
      if (result.proportions(c, j) > best_mass) {
        best = c;
        best_mass = result.proportions(c, j);
      }
    }
    if (best_mass <= 0.0) result.zero_mass_cols.push_back(j);
    predicted[static_cast<std::size_t>(j)] = best;
  }
  result.labels = LabelVector(std::move(predicted), k);
  return result;
}

BlockDiagAccuracy block_diag_accuracy(const Matrix& plan, const LabelVector& labels1,
                                      const LabelVector& labels2) {
  if (labels1.size() != plan.rows() || labels2.size() != plan.cols()) {
    throw DimensionError("block_diag_accuracy: label lengths do not match plan shape");
  }
  const double total = plan.sum();
  if (total <= 0.0) return {0.0, true};

  double matched = 0.0;
  for (Index i = 0; i < plan.rows(); ++i) {
    for (Index j = 0; j < plan.cols(); ++j) {
      if (labels1.labels[static_cast<std::size_t>(i)] ==
          labels2.labels[static_cast<std::size_t>(j)]) {
        matched += plan(i, j);
      }
    }
  }
  return {matched / total, false};
}

double foscttm(const Matrix& x1_aligned, const Matrix& x2) {
  if (x1_aligned.rows() != x2.rows() || x1_aligned.cols() != x2.cols()) {
    throw DimensionError("foscttm: aligned matrices must have identical shapes");
  }
  const Index n = x1_aligned.rows();
  if (n < 2) throw DimensionError("foscttm needs at least two rows");

  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double true_dist_1 = (x1_aligned.row(i) - x2.row(i)).norm();
    const double true_dist_2 = (x2.row(i) - x1_aligned.row(i)).norm();
    Index closer_1 = 0, closer_2 = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if ((x1_aligned.row(i) - x2.row(j)).norm() < true_dist_1) ++closer_1;
      if ((x2.row(i) - x1_aligned.row(j)).norm() < true_dist_2) ++closer_2;
    }
    total += static_cast<double>(closer_1) / static_cast<double>(n - 1);
    total += static_cast<double>(closer_2) / static_cast<double>(n - 1);
  }
  return total / static_cast<double>(2 * n);
}

double class_marginal_tv(const LabelVector& labels_a, const LabelVector& labels_b) {
  if (labels_a.labels.empty() || labels_b.labels.empty()) {
    throw DimensionError("class_marginal_tv: empty label vectors");
  }
  const int k = std::max(labels_a.num_classes, labels_b.num_classes);
  Vector prop_a = Vector::Zero(k), prop_b = Vector::Zero(k);
  for (int label : labels_a.labels) prop_a[label] += 1.0 / labels_a.labels.size();
  for (int label : labels_b.labels) prop_b[label] += 1.0 / labels_b.labels.size();
  return 0.5 * (prop_a - prop_b).cwiseAbs().sum();
}

}  // namespace ucoot
