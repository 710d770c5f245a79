#include "ucoot/robustness.hpp"

#include <cmath>
#include <random>

namespace ucoot {

void ContaminationSpec::validate() const {
  if (!(alpha_s >= 0.0 && alpha_s <= 1.0) || !(alpha_f >= 0.0 && alpha_f <= 1.0)) {
    throw ConfigError("contamination: alpha values must lie in [0, 1]");
  }
  if (outlier_rows < 0 || outlier_cols < 0) {
    throw ConfigError("contamination: outlier counts must be >= 0");
  }
  if (!(value_low <= value_high) || !std::isfinite(value_low) || !std::isfinite(value_high)) {
    throw ConfigError("contamination: invalid value range");
  }
  if (alpha_s < 1.0 && outlier_rows == 0) {
    throw ConfigError("contamination: alpha_s < 1 needs at least one outlier row");
  }
  if (alpha_f < 1.0 && outlier_cols == 0) {
    throw ConfigError("contamination: alpha_f < 1 needs at least one outlier column");
  }
}

Contaminated contaminate(const Dataset& clean, const ContaminationSpec& spec) {
  spec.validate();
  const Index n = clean.rows(), d = clean.cols();
  const Index rows = n + spec.outlier_rows, cols = d + spec.outlier_cols;

  Matrix values(rows, cols);
  values.topLeftCorner(n, d) = clean.values();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> draw(spec.value_low, spec.value_high);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (i >= n || j >= d) values(i, j) = draw(rng);
    }
  }

  Vector sample_weights(rows), feature_weights(cols);
  sample_weights.head(n) =
      clean.sample_weights().weights() * (spec.alpha_s / clean.sample_weights().mass());
  if (spec.outlier_rows > 0) {
    sample_weights.tail(spec.outlier_rows)
        .setConstant((1.0 - spec.alpha_s) / spec.outlier_rows);
  }
  feature_weights.head(d) =
      clean.feature_weights().weights() * (spec.alpha_f / clean.feature_weights().mass());
  if (spec.outlier_cols > 0) {
    feature_weights.tail(spec.outlier_cols)
        .setConstant((1.0 - spec.alpha_f) / spec.outlier_cols);
  }

  Contaminated result{Dataset(std::move(values), std::move(sample_weights),
                              std::move(feature_weights)),
                      {},
                      {}};
  for (Index i = n; i < rows; ++i) result.outlier_rows.push_back(i);
  for (Index j = d; j < cols; ++j) result.outlier_cols.push_back(j);
  return result;
}

std::pair<Dataset, Dataset> cosine_outlier_instance(double tau) {
  constexpr Index kRows = 20, kCols = 15;
  Matrix clean(kRows, kCols);
  for (Index i = 0; i < kRows; ++i) {
    for (Index j = 0; j < kCols; ++j) {
      clean(i, j) = std::cos((i + 1) * M_PI / static_cast<double>(kRows)) +
                    std::cos((j + 1) * M_PI / static_cast<double>(kCols));
    }
  }
  Matrix modified = clean;
  modified.row(kRows - 1).setConstant(tau);
  return {Dataset::with_uniform_weights(std::move(clean)),
          Dataset::with_uniform_weights(std::move(modified))};
}

double max_cost_deviation(const Dataset& contaminated, const Dataset& target) {
  double worst = 0.0;
  const Matrix& a = contaminated.values();
  const Matrix& b = target.values();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = 0; k < a.cols(); ++k) {
      for (Index j = 0; j < b.rows(); ++j) {
        for (Index l = 0; l < b.cols(); ++l) {
          const double dev = a(i, k) - b(j, l);
          worst = std::max(worst, dev * dev);
        }
      }
    }
  }
  return worst;
}

CostExtrema cost_extrema(const Dataset& contaminated, const Dataset& target,
                         const std::vector<Index>& outlier_rows,
                         const std::vector<Index>& outlier_cols) {
  if (outlier_rows.empty() || outlier_cols.empty()) {
    throw DegenerateError("cost_extrema: delta0 needs nonempty outlier index sets");
  }
  const Matrix& a = contaminated.values();
  const Matrix& b = target.values();
  for (Index i : outlier_rows) {
    if (i < 0 || i >= a.rows()) throw DimensionError("cost_extrema: outlier row out of range");
  }
  for (Index k : outlier_cols) {
    if (k < 0 || k >= a.cols()) throw DimensionError("cost_extrema: outlier col out of range");
  }

  CostExtrema extrema{kInf, 0.0};
  for (Index i : outlier_rows) {
    for (Index k : outlier_cols) {
      for (Index j = 0; j < b.rows(); ++j) {
        for (Index l = 0; l < b.cols(); ++l) {
          const double dev = a(i, k) - b(j, l);
          extrema.delta0 = std::min(extrema.delta0, dev * dev);
        }
      }
    }
  }
  extrema.delta_inf = max_cost_deviation(contaminated, target);
  return extrema;
}

double coot_sensitivity_bound(double alpha_s, double alpha_f, double delta0) {
  return (1.0 - alpha_s) * (1.0 - alpha_f) * delta0;
}

double ucoot_robustness_bound(double clean_value, double transported_mass, double lambda1,
                              double lambda2, double alpha_s, double alpha_f,
                              double delta_inf) {
  if (!(transported_mass > 0.0)) {
    throw ConfigError("robustness bound: transported mass must be positive");
  }
  const double delta = 2.0 * (lambda1 + lambda2) * (1.0 - alpha_s * alpha_f);
  if (delta == 0.0) return clean_value;
  const double k = transported_mass + clean_value / transported_mass + delta;
  const double dm = delta * transported_mass;
  return alpha_s * alpha_f * clean_value +
         dm * (1.0 - std::exp(-(delta_inf * (1.0 + transported_mass) + k) / dm));
}

LinearEntropyMin linear_entropy_min(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ConfigError("linear_entropy_min requires a > 0 and b > 0");
  }
  const double argmin = std::exp(-a / b);
  return {argmin, b * (1.0 - argmin)};
}

}  // namespace ucoot
