#include "ucoot/experiments.hpp"

#include <cmath>

namespace ucoot {

namespace {

std::uint64_t point_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 step keeps per-point streams well separated
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SolverConfig relaxed_config(double lambda1, double lambda2, double eps, int outer,
                            int inner_iter, double inner_tol) {
  SolverConfig config;
  config.lambda1 = lambda1;
  config.lambda2 = lambda2;
  config.eps = eps;
  config.outer_max_iter = outer;
  config.inner_max_iter = inner_iter;
  config.inner_tol = inner_tol;
  return config;
}

SolverConfig balanced_config(double eps, int outer, int inner_iter, double inner_tol) {
  SolverConfig config = relaxed_config(kInf, kInf, eps, outer, inner_iter, inner_tol);
  return config;
}

double label_accuracy(const LabelVector& predicted, const LabelVector& truth) {
  Index hits = 0;
  for (Index i = 0; i < truth.size(); ++i) {
    if (predicted.labels[static_cast<std::size_t>(i)] ==
        truth.labels[static_cast<std::size_t>(i)]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace

std::vector<int> balanced_labels(int classes, int per_class) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(classes) * per_class);
  for (int k = 0; k < classes; ++k) {
    labels.insert(labels.end(), per_class, k);
  }
  return labels;
}

TwoViewData make_mixture_views(const MixtureViewConfig& config,
                               const std::vector<int>& labels1,
                               const std::vector<int>& labels2, std::mt19937_64& rng) {
  if (config.classes < 2) throw ConfigError("mixture views need at least two classes");
  if (labels1.empty() || labels2.empty()) throw ConfigError("mixture views need samples");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, config.dim1 - 1);
  std::uniform_real_distribution<double> stretch(0.8, 1.25);

  Matrix means1(config.classes, config.dim1);
  for (Index i = 0; i < means1.rows(); ++i) {
    for (Index j = 0; j < means1.cols(); ++j) means1(i, j) = config.separation * gauss(rng);
  }
  Matrix means2(config.classes, config.dim2);
  for (Index j = 0; j < means2.cols(); ++j) {
    const Index source = pick(rng);
    const double scale = stretch(rng);
    means2.col(j) = means1.col(source) * scale;
  }

  auto sample_view = [&](const Matrix& means, const std::vector<int>& labels) {
    Matrix values(static_cast<Index>(labels.size()), means.cols());
    for (Index i = 0; i < values.rows(); ++i) {
      const int label = labels[static_cast<std::size_t>(i)];
      if (label < 0 || label >= config.classes) {
        throw ConfigError("mixture views: label outside class range");
      }
      for (Index j = 0; j < values.cols(); ++j) {
        values(i, j) = means(label, j) + config.noise * gauss(rng);
      }
    }
    return Dataset::with_uniform_weights(std::move(values));
  };

  TwoViewData data{sample_view(means1, labels1), sample_view(means2, labels2),
                   LabelVector(labels1, config.classes), LabelVector(labels2, config.classes)};
  return data;
}

std::vector<RobustSweepRow> run_robust_sweep(const std::vector<double>& taus,
                                             const RobustSweepConfig& config) {
  if (taus.empty()) throw ConfigError("robust sweep needs a nonempty tau grid");

  std::vector<RobustSweepRow> rows;
  rows.reserve(taus.size());

  // Clean reference solve, shared across the grid: modified vs clean table at
  // tau has the clean pair (clean, clean).
  const auto [clean, _] = cosine_outlier_instance(0.0);
  const SolverConfig relaxed =
      relaxed_config(config.lambda1, config.lambda2, config.eps, config.outer_max_iter,
                     config.inner_max_iter, config.inner_tol);
  const SolveReport clean_report = bcd_solve(clean, clean, relaxed);
  const double clean_mass = clean_report.couplings.sample_plan.sum();

  // The modified table perturbs one row: sample contamination only.
  const double alpha_s = 19.0 / 20.0;
  const double alpha_f = 1.0;

  for (std::size_t idx = 0; idx < taus.size(); ++idx) {
    const double tau = taus[idx];
    auto [clean_tau, modified] = cosine_outlier_instance(tau);
    RobustSweepRow row;
    row.tau = tau;
    row.seed = point_seed(config.seed, idx);

    const SolveReport relaxed_report = bcd_solve(modified, clean_tau, relaxed);
    row.ucoot_obj = relaxed_report.objective;
    row.ucoot_converged = relaxed_report.converged;

    const SolveReport balanced_report =
        bcd_solve(modified, clean_tau,
                  balanced_config(config.eps, config.outer_max_iter, config.inner_max_iter,
                                  config.inner_tol));
    row.coot_obj = balanced_report.objective;
    row.coot_converged = balanced_report.converged;

    // No feature outliers: the sensitivity lower bound degenerates to zero.
    row.lower_bound = coot_sensitivity_bound(alpha_s, alpha_f, 0.0);
    row.upper_bound = ucoot_robustness_bound(
        clean_report.value, clean_mass, config.lambda1, config.lambda2, alpha_s, alpha_f,
        max_cost_deviation(modified, clean_tau));
    rows.push_back(row);
  }
  return rows;
}

std::vector<TargetShiftRow> run_target_shift(const std::vector<double>& rhos,
                                             const TargetShiftConfig& config) {
  if (rhos.empty()) throw ConfigError("target shift needs a nonempty rho grid");
  if (config.views.classes < 2) {
    throw ConfigError("target shift needs at least two classes");
  }
  if (config.seeds < 1) throw ConfigError("target shift needs at least one seed");

  std::vector<TargetShiftRow> rows;
  const std::vector<int> target_labels = balanced_labels(config.views.classes, config.per_class);

  for (std::size_t r = 0; r < rhos.size(); ++r) {
    const double rho = rhos[r];
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    for (int s = 0; s < config.seeds; ++s) {
      TargetShiftRow row;
      row.rho = rho;
      row.seed = point_seed(config.base_seed, r * static_cast<std::size_t>(config.seeds) +
                                                  static_cast<std::size_t>(s));
      std::mt19937_64 rng(row.seed);

      // Thin out the first half of the classes in the source view.
      std::vector<int> source_labels;
      for (int k = 0; k < config.views.classes; ++k) {
        const bool shifted = k < config.views.classes / 2;
        const int count = shifted
                              ? std::max(1, static_cast<int>(std::lround(config.per_class * rho)))
                              : config.per_class;
        source_labels.insert(source_labels.end(), count, k);
      }

      TwoViewData data = make_mixture_views(config.views, source_labels, target_labels, rng);
      row.tv = class_marginal_tv(data.labels1, data.labels2);

      const SolveReport relaxed =
          bcd_solve(data.view1, data.view2,
                    relaxed_config(config.lambda, config.lambda, config.eps,
                                   config.outer_max_iter, config.inner_max_iter,
                                   config.inner_tol));
      row.ucoot_acc = label_accuracy(
          label_propagate(relaxed.couplings.sample_plan, data.labels1).labels, data.labels2);

      const SolveReport balanced =
          bcd_solve(data.view1, data.view2,
                    balanced_config(config.eps, config.outer_max_iter, config.inner_max_iter,
                                    config.inner_tol));
      row.coot_acc = label_accuracy(
          label_propagate(balanced.couplings.sample_plan, data.labels1).labels, data.labels2);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<OutlierDemoRow> run_outlier_demo(const OutlierDemoConfig& config) {
  if (config.seeds < 1) throw ConfigError("outlier demo needs at least one seed");
  if (!(config.outlier_rate > 0.0 && config.outlier_rate < 1.0)) {
    throw ConfigError("outlier rate must lie in (0, 1)");
  }

  std::vector<OutlierDemoRow> rows;
  const std::vector<int> labels = balanced_labels(config.views.classes, config.per_class);
  const Index n_clean = static_cast<Index>(labels.size());
  const Index n_out =
      std::max<Index>(1, static_cast<Index>(std::lround(config.outlier_rate * n_clean)));

  for (int s = 0; s < config.seeds; ++s) {
    OutlierDemoRow row;
    row.seed = point_seed(config.base_seed, static_cast<std::size_t>(s));
    std::mt19937_64 rng(row.seed);

    TwoViewData data = make_mixture_views(config.views, labels, labels, rng);

    // Append uniform-noise samples to the target view; they get a class of
    // their own so matched mass never counts them.
    std::uniform_real_distribution<double> noise(config.outlier_low, config.outlier_high);
    Matrix target(n_clean + n_out, data.view2.cols());
    target.topRows(n_clean) = data.view2.values();
    for (Index i = n_clean; i < target.rows(); ++i) {
      for (Index j = 0; j < target.cols(); ++j) target(i, j) = noise(rng);
    }
    Dataset contaminated = Dataset::with_uniform_weights(std::move(target));
    std::vector<int> target_labels = labels;
    target_labels.insert(target_labels.end(), static_cast<std::size_t>(n_out),
                         config.views.classes);
    const LabelVector target_label_vec(target_labels, config.views.classes + 1);
    const LabelVector source_label_vec(labels, config.views.classes + 1);

    auto outlier_mass = [&](const Matrix& plan) {
      return plan.rightCols(n_out).sum() / plan.sum();
    };

    const SolveReport relaxed =
        bcd_solve(data.view1, contaminated,
                  relaxed_config(config.lambda, config.lambda, config.eps,
                                 config.outer_max_iter, config.inner_max_iter,
                                 config.inner_tol));
    row.ucoot_outlier_mass = outlier_mass(relaxed.couplings.sample_plan);
    row.ucoot_accuracy =
        block_diag_accuracy(relaxed.couplings.sample_plan, source_label_vec, target_label_vec)
            .value;

    const SolveReport balanced =
        bcd_solve(data.view1, contaminated,
                  balanced_config(config.eps, config.outer_max_iter, config.inner_max_iter,
                                  config.inner_tol));
    row.coot_outlier_mass = outlier_mass(balanced.couplings.sample_plan);
    row.coot_accuracy =
        block_diag_accuracy(balanced.couplings.sample_plan, source_label_vec, target_label_vec)
            .value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ucoot
