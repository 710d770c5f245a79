#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ucoot/types.hpp"

namespace ucoot {

/// Discrete contamination model: uniform-random outlier rows/columns appended
/// to a clean table, with weights rescaled so the clean atoms carry total
/// mass alpha and the outliers share 1 - alpha per axis.
struct ContaminationSpec {
  double alpha_s = 1.0;
  double alpha_f = 1.0;
  int outlier_rows = 0;
  int outlier_cols = 0;
  double value_low = 0.0;
  double value_high = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Contaminated {
  Dataset data;
  std::vector<Index> outlier_rows;
  std::vector<Index> outlier_cols;
};

Contaminated contaminate(const Dataset& clean, const ContaminationSpec& spec);

/// The 20 x 15 table A_ij = cos(i/20 pi) + cos(j/15 pi) (1-based indices)
/// with uniform weights, paired with its copy whose last row is replaced by
/// the constant tau. Returns (clean, modified).
std::pair<Dataset, Dataset> cosine_outlier_instance(double tau);

struct CostExtrema {
  double delta0 = 0.0;    // min squared deviation from outlier cells to the target
  double delta_inf = 0.0; // max squared deviation over all cells
};

/// Exhaustive scan of (A_ik - B_jl)^2 with (i, k) ranging over the
/// contaminated table and (j, l) over the target. delta0 restricts (i, k) to
/// the given outlier index sets, which must both be nonempty.
CostExtrema cost_extrema(const Dataset& contaminated, const Dataset& target,
                         const std::vector<Index>& outlier_rows,
                         const std::vector<Index>& outlier_cols);

/// Max of (A_ik - B_jl)^2 alone; usable when an outlier set is empty.
double max_cost_deviation(const Dataset& contaminated, const Dataset& target);

/// Lower bound on the balanced objective under contamination:
/// (1 - alpha_s)(1 - alpha_f) delta0.
double coot_sensitivity_bound(double alpha_s, double alpha_f, double delta0);

/// Upper bound on the relaxed objective under contamination. With
/// delta = 2 (lambda1 + lambda2)(1 - alpha_s alpha_f) and
/// K = M + clean_value / M + delta,
///
///   alpha_s alpha_f clean_value
///     + delta M [1 - exp(-(delta_inf (1 + M) + K) / (delta M))].
///
/// Returns clean_value when delta = 0 (the uncontaminated limit). M is the
/// transported mass of the clean solve and must be positive.
double ucoot_robustness_bound(double clean_value, double transported_mass, double lambda1,
                              double lambda2, double alpha_s, double alpha_f,
                              double delta_inf);

struct LinearEntropyMin {
  double argmin = 0.0;
  double min_value = 0.0;
};

/// Closed-form minimum of t -> a t + b (t log t - t + 1) over (0, 1] for
/// a, b > 0: attained at exp(-a/b) with value b (1 - exp(-a/b)).
LinearEntropyMin linear_entropy_min(double a, double b);

/// Everything a bound comparison needs in one record.
struct BoundsReport {
  double delta0 = 0.0;
  double delta_inf = 0.0;
  double transported_mass = 0.0;
  double delta = 0.0;
  double k = 0.0;
  double lower_bound = 0.0;  // balanced-mode sensitivity bound
  double upper_bound = 0.0;  // relaxed-mode robustness bound
};

}  // namespace ucoot
