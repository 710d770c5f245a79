#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ucoot {

// Dense row-major doubles throughout. The problems this library targets are
// at most a few thousand rows; sparse storage is deliberately unsupported.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible shapes or lengths.
struct DimensionError : Error {
  using Error::Error;
};

/// Invalid parameter combination (solver choice, penalty values, grids).
struct ConfigError : Error {
  using Error::Error;
};

/// Structurally valid input that makes the problem ill-posed (zero mass,
/// empty support).
struct DegenerateError : Error {
  using Error::Error;
};

/// Filesystem-level failure (missing file, unwritable directory).
struct IoError : Error {
  using Error::Error;
};

/// Malformed file contents (ragged CSV rows, non-numeric fields).
struct ParseError : Error {
  using Error::Error;
};

/// A nonnegative weight vector with its cached total mass.
///
/// Weights are accepted unnormalized and never renormalized by the library.
/// An all-zero measure is valid (it arises as the marginal of a zero plan);
/// solvers that need strictly positive atoms check for that themselves.
class Measure {
 public:
  explicit Measure(Vector weights) : weights_(std::move(weights)) {
    for (Index i = 0; i < weights_.size(); ++i) {
      if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
        throw ConfigError("measure weights must be finite and nonnegative");
      }
    }
    mass_ = weights_.sum();
  }

  /// Uniform probability weights 1/n.
  static Measure uniform(Index n) {
    if (n <= 0) throw DimensionError("measure size must be positive");
    return Measure(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  }

  const Vector& weights() const { return weights_; }
  double mass() const { return mass_; }
  Index size() const { return weights_.size(); }

  bool strictly_positive() const { return weights_.size() > 0 && weights_.minCoeff() > 0.0; }

 private:
  Vector weights_;
  double mass_ = 0.0;
};

/// A dense table of sample-feature interactions together with a measure on
/// samples (rows) and a measure on features (columns).
class Dataset {
 public:
  Dataset(Matrix values, Vector sample_weights, Vector feature_weights)
      : values_(std::move(values)),
        sample_weights_(Measure(std::move(sample_weights))),
        feature_weights_(Measure(std::move(feature_weights))) {
    if (values_.rows() == 0 || values_.cols() == 0) {
      throw DimensionError("dataset must have at least one row and one column");
    }
    if (sample_weights_.size() != values_.rows()) {
      throw DimensionError("sample weight length " + std::to_string(sample_weights_.size()) +
                           " does not match row count " + std::to_string(values_.rows()));
    }
    if (feature_weights_.size() != values_.cols()) {
      throw DimensionError("feature weight length " + std::to_string(feature_weights_.size()) +
                           " does not match column count " + std::to_string(values_.cols()));
    }
    if (!values_.allFinite()) {
      throw ConfigError("dataset values must be finite");
    }
    if (sample_weights_.mass() <= 0.0 || feature_weights_.mass() <= 0.0) {
      throw ConfigError("each weight vector needs at least one strictly positive entry");
    }
  }

  /// Wraps a value matrix with uniform probability weights on both axes.
  static Dataset with_uniform_weights(Matrix values) {
    const Index n = values.rows(), d = values.cols();
    if (n == 0 || d == 0) throw DimensionError("dataset must be nonempty");
    return Dataset(std::move(values), Vector::Constant(n, 1.0 / static_cast<double>(n)),
                   Vector::Constant(d, 1.0 / static_cast<double>(d)));
  }

  const Matrix& values() const { return values_; }
  const Measure& sample_weights() const { return sample_weights_; }
  const Measure& feature_weights() const { return feature_weights_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }

 private:
  Matrix values_;
  Measure sample_weights_;
  Measure feature_weights_;
};

/// A sample plan and a feature plan. The block-coordinate solver maintains
/// equal total mass between the two on exit from every outer iteration.
struct CouplingPair {
  Matrix sample_plan;
  Matrix feature_plan;

  void validate() const {
    if (!sample_plan.allFinite() || !feature_plan.allFinite() ||
        sample_plan.minCoeff() < 0.0 || feature_plan.minCoeff() < 0.0) {
      throw ConfigError("coupling plans must be finite and nonnegative");
    }
  }
};

/// Marginal discrepancy used by the objective. Indicator is only meaningful
/// for objective evaluation in the balanced mode; solvers reject it as a
/// finite-weight penalty.
enum class Divergence { KL, Indicator };

}  // namespace ucoot
