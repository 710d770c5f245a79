#pragma once

#include <random>

#include "ucoot/types.hpp"

namespace ucoot::testing {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> draw(lo, hi);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = draw(rng);
  }
  return m;
}

inline Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> draw(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = draw(rng);
  }
  return m;
}

inline Vector random_positive(Index n, std::mt19937_64& rng, double lo = 0.2, double hi = 1.5) {
  std::uniform_real_distribution<double> draw(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = draw(rng);
  return v;
}

inline Vector uniform_weights(Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

/// Quadruple-loop oracle for sum_{k,l} (A_ik - B_jl)^2 plan_kl.
inline Matrix linearized_cost_oracle(const Matrix& a, const Matrix& b, const Matrix& plan) {
  Matrix cost = Matrix::Zero(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      for (Index k = 0; k < a.cols(); ++k) {
        for (Index l = 0; l < b.cols(); ++l) {
          const double dev = a(i, k) - b(j, l);
          cost(i, j) += dev * dev * plan(k, l);
        }
      }
    }
  }
  return cost;
}

}  // namespace ucoot::testing
