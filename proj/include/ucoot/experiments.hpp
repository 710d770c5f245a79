#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ucoot/coot.hpp"
#include "ucoot/robustness.hpp"
#include "ucoot/transfer.hpp"
#include "ucoot/types.hpp"

namespace ucoot {

/// Two tabular views of one Gaussian-mixture label process, living in
/// different feature spaces. View-2 features are scaled copies of randomly
/// selected view-1 features, so a ground-truth feature correspondence exists
/// while d1 != d2. Stand-in for paired real-world feature extractors.
struct MixtureViewConfig {
  int classes = 3;
  int dim1 = 5;
  int dim2 = 7;
  double separation = 2.0;  // spread of the class means
  double noise = 0.2;       // within-class standard deviation
};

struct TwoViewData {
  Dataset view1;
  Dataset view2;
  LabelVector labels1;
  LabelVector labels2;
};

TwoViewData make_mixture_views(const MixtureViewConfig& config,
                               const std::vector<int>& labels1,
                               const std::vector<int>& labels2, std::mt19937_64& rng);

/// n copies of each label 0..classes-1, in order.
std::vector<int> balanced_labels(int classes, int per_class);

// ---------------------------------------------------------------------------
// Sweep over the outlier level tau of the cosine instance. Solves both the
// balanced and relaxed problems between the modified table and the clean one
// and evaluates the theoretical sensitivity/robustness bounds alongside.
struct RobustSweepConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double eps = 1e-2;
  int outer_max_iter = 100;
  int inner_max_iter = 2000;
  double inner_tol = 1e-9;
  std::uint64_t seed = 0;
};

struct RobustSweepRow {
  double tau = 0.0;
  double coot_obj = 0.0;
  double ucoot_obj = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::uint64_t seed = 0;
  bool coot_converged = false;
  bool ucoot_converged = false;
};

std::vector<RobustSweepRow> run_robust_sweep(const std::vector<double>& taus,
                                             const RobustSweepConfig& config);

// ---------------------------------------------------------------------------
// Class-proportion shift: the source view keeps only round(per_class * rho)
// samples for the first half of the classes while the target stays balanced.
// Accuracy is label-propagation accuracy on the target.
struct TargetShiftConfig {
  MixtureViewConfig views{4, 6, 9, 2.0, 0.2};
  int per_class = 12;
  double lambda = 5.0;
  double eps = 1e-2;
  int outer_max_iter = 60;
  int inner_max_iter = 2000;
  double inner_tol = 1e-8;
  int seeds = 5;
  std::uint64_t base_seed = 7;
};

struct TargetShiftRow {
  double rho = 0.0;
  double tv = 0.0;
  double coot_acc = 0.0;
  double ucoot_acc = 0.0;
  std::uint64_t seed = 0;
};

std::vector<TargetShiftRow> run_target_shift(const std::vector<double>& rhos,
                                             const TargetShiftConfig& config);

// ---------------------------------------------------------------------------
// Outlier rejection: append uniform-noise samples to the target view and
// compare how much mass each solver sends to them, plus the block-diagonal
// accuracy of the resulting sample plans (outliers carry a class of their
// own that never matches).
struct OutlierDemoConfig {
  MixtureViewConfig views{3, 5, 7, 2.0, 0.2};
  int per_class = 20;
  double outlier_rate = 0.05;
  double outlier_low = 6.0;
  double outlier_high = 10.0;
  double lambda = 5.0;
  double eps = 1e-2;
  int outer_max_iter = 60;
  int inner_max_iter = 2000;
  double inner_tol = 1e-8;
  int seeds = 10;
  std::uint64_t base_seed = 11;
};

struct OutlierDemoRow {
  std::uint64_t seed = 0;
  double ucoot_outlier_mass = 0.0;  // fraction of total plan mass
  double coot_outlier_mass = 0.0;
  double ucoot_accuracy = 0.0;      // block-diagonal accuracy
  double coot_accuracy = 0.0;
};

std::vector<OutlierDemoRow> run_outlier_demo(const OutlierDemoConfig& config);

}  // namespace ucoot
