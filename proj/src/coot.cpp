#include "ucoot/coot.hpp"

#include <cmath>

#include "ucoot/divergence.hpp"

namespace ucoot {

InnerSolver SolverConfig::resolved_inner() const {
  if (inner != InnerSolver::Auto) return inner;
  return eps > 0.0 ? InnerSolver::Scaling : InnerSolver::Nnpr;
}

void SolverConfig::validate() const {
  if (std::isnan(lambda1) || std::isnan(lambda2) || lambda1 <= 0.0 || lambda2 <= 0.0) {
    throw ConfigError("lambda1 and lambda2 must be positive (or +inf for balanced mode)");
  }
  if (std::isinf(lambda1) != std::isinf(lambda2)) {
    throw ConfigError("semi-relaxed penalties (one finite, one infinite) are unsupported");
  }
  if (!std::isfinite(eps) || eps < 0.0) throw ConfigError("eps must be finite and >= 0");
  if (balanced_mode() && eps == 0.0) {
    throw ConfigError("balanced mode requires eps > 0 (exact-LP inner solves are unsupported)");
  }
  const InnerSolver solver = resolved_inner();
  if (solver == InnerSolver::Scaling && eps == 0.0) {
    throw ConfigError("scaling inner solver requires eps > 0");
  }
  if (solver == InnerSolver::Nnpr && balanced_mode()) {
    throw ConfigError("nnpr inner solver requires finite penalties");
  }
  if (outer_max_iter < 1 || inner_max_iter < 1) {
    throw ConfigError("iteration budgets must be >= 1");
  }
  if (!(outer_tol >= 0.0) || !(inner_tol >= 0.0)) {
    throw ConfigError("tolerances must be >= 0");
  }
  if (init == InitStrategy::Provided && !init_couplings.has_value()) {
    throw ConfigError("init = Provided requires init_couplings");
  }
  if (init == InitStrategy::WarmStartUcoot &&
      (!std::isfinite(warm_lambda1) || !std::isfinite(warm_lambda2) || warm_lambda1 <= 0.0 ||
       warm_lambda2 <= 0.0)) {
    throw ConfigError("warm start requires finite positive penalty weights");
  }
}

Matrix linearized_cost(const Matrix& a, const Matrix& b, const Matrix& feature_plan) {
  if (a.cols() != feature_plan.rows() || b.cols() != feature_plan.cols()) {
    throw DimensionError("linearized_cost: plan is " + std::to_string(feature_plan.rows()) +
                         "x" + std::to_string(feature_plan.cols()) +
                         " but datasets have " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.cols()) + " features");
  }
  const Vector plan_rows = feature_plan.rowwise().sum();
  const Vector plan_cols = feature_plan.colwise().sum();
  const Vector a_sq = (a.array().square().matrix() * plan_rows);
  const Vector b_sq = (b.array().square().matrix() * plan_cols);
  Matrix cost = (-2.0 * a) * feature_plan * b.transpose();
  cost.colwise() += a_sq;
  cost.rowwise() += b_sq.transpose();
  return cost;
}

Matrix linearized_cost(const Dataset& a, const Dataset& b, const Matrix& feature_plan) {
  return linearized_cost(a.values(), b.values(), feature_plan);
}

namespace {

// sum_i p_i log(p_i / q_i) over a plan against the outer product of its
// references; the penalty inner products that shift the local cost.
double plan_penalty_shift(const Matrix& plan, const Vector& ref1, const Vector& ref2,
                          double lambda1, double lambda2, double eps) {
  const Vector rows = plan.rowwise().sum();
  const Vector cols = plan.colwise().sum();
  double shift = lambda1 * kl_log_term(rows, ref1) + lambda2 * kl_log_term(cols, ref2);
  if (eps > 0.0) shift += eps * kl_log_term_outer(plan, ref1, ref2);
  return shift;
}

double relative_mass_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

UotProblem local_uot_problem(const Dataset& a, const Dataset& b, const Matrix& fixed_plan,
                             const SolverConfig& config, BlockSide which) {
  const bool sample_side = which == BlockSide::Sample;
  const Index fixed_rows = sample_side ? a.cols() : a.rows();
  const Index fixed_cols = sample_side ? b.cols() : b.rows();
  if (fixed_plan.rows() != fixed_rows || fixed_plan.cols() != fixed_cols) {
    throw DimensionError("local_uot_problem: fixed plan shape mismatch");
  }
  const double fixed_mass = fixed_plan.sum();
  if (fixed_mass <= 0.0) {
    throw DegenerateError("local_uot_problem: fixed plan has zero mass");
  }

  UotProblem prob;
  if (sample_side) {
    prob.cost = linearized_cost(a.values(), b.values(), fixed_plan);
    prob.mu = a.sample_weights().weights();
    prob.nu = b.sample_weights().weights();
  } else {
    prob.cost = linearized_cost(a.values().transpose(), b.values().transpose(), fixed_plan);
    prob.mu = a.feature_weights().weights();
    prob.nu = b.feature_weights().weights();
  }

  if (config.balanced_mode()) {
    // Constant cost shifts cannot move the constrained minimizer.
    prob.rho1 = kInf;
    prob.rho2 = kInf;
  } else {
    const Vector& ref1 =
        sample_side ? a.feature_weights().weights() : a.sample_weights().weights();
    const Vector& ref2 =
        sample_side ? b.feature_weights().weights() : b.sample_weights().weights();
    const double shift = plan_penalty_shift(fixed_plan, ref1, ref2, config.lambda1,
                                            config.lambda2, config.eps);
    if (std::isinf(shift)) {
      throw DegenerateError(
          "local_uot_problem: fixed plan puts mass outside its reference support");
    }
    prob.cost.array() += shift;
    prob.rho1 = config.lambda1 * fixed_mass;
    prob.rho2 = config.lambda2 * fixed_mass;
  }
  prob.eps = config.eps * fixed_mass;
  return prob;
}

ObjectiveReport evaluate_objective(const Dataset& a, const Dataset& b,
                                   const CouplingPair& couplings, const SolverConfig& config) {
  const Matrix& ps = couplings.sample_plan;
  const Matrix& pf = couplings.feature_plan;
  if (ps.rows() != a.rows() || ps.cols() != b.rows() || pf.rows() != a.cols() ||
      pf.cols() != b.cols()) {
    throw DimensionError("evaluate_objective: coupling shapes do not match datasets");
  }

  ObjectiveReport report;
  ObjectiveParts& parts = report.parts;
  parts.transport_cost = (linearized_cost(a, b, pf).array() * ps.array()).sum();

  const Vector ps_rows = ps.rowwise().sum(), ps_cols = ps.colwise().sum();
  const Vector pf_rows = pf.rowwise().sum(), pf_cols = pf.colwise().sum();
  const Vector& mu1s = a.sample_weights().weights();
  const Vector& mu2s = b.sample_weights().weights();
  const Vector& mu1f = a.feature_weights().weights();
  const Vector& mu2f = b.feature_weights().weights();

  // Joint entropic term KL(ps (x) pf | product of all four references),
  // through the same outer-product decomposition as tensor_kl.
  const double ms = ps.sum(), mf = pf.sum();
  const double ms_ref = a.sample_weights().mass() * b.sample_weights().mass();
  const double mf_ref = a.feature_weights().mass() * b.feature_weights().mass();
  if (ms == 0.0 || mf == 0.0) {
    parts.entropic = ms_ref * mf_ref;
  } else {
    const double kl_s = kl_mass_outer(ps, mu1s, mu2s);
    const double kl_f = kl_mass_outer(pf, mu1f, mu2f);
    parts.entropic = (std::isinf(kl_s) || std::isinf(kl_f))
                         ? kInf
                         : mf * kl_s + ms * kl_f + (ms - ms_ref) * (mf - mf_ref);
  }

  if (config.balanced_mode()) {
    const double tol1 = 1e-6 * std::max(1.0, a.sample_weights().mass());
    const double tol2 = 1e-6 * std::max(1.0, b.sample_weights().mass());
    parts.marginals1_feasible = (ps_rows - mu1s).cwiseAbs().sum() <= tol1 &&
                                (pf_rows - mu1f).cwiseAbs().sum() <= tol1;
    parts.marginals2_feasible = (ps_cols - mu2s).cwiseAbs().sum() <= tol2 &&
                                (pf_cols - mu2f).cwiseAbs().sum() <= tol2;
    report.total = (parts.marginals1_feasible && parts.marginals2_feasible)
                       ? parts.transport_cost
                       : kInf;
  } else {
    parts.kl1 = tensor_kl(ps_rows, pf_rows, mu1s, mu1f);
    parts.kl2 = tensor_kl(ps_cols, pf_cols, mu2s, mu2f);
    report.total = parts.transport_cost + config.lambda1 * parts.kl1 +
                   config.lambda2 * parts.kl2 + config.eps * parts.entropic;
  }
  return report;
}

namespace {

UotResult run_inner(const UotProblem& prob, const SolverConfig& config) {
  switch (config.resolved_inner()) {
    case InnerSolver::Nnpr:
      return nnpr_solve(prob, config.inner_tol, config.inner_max_iter);
    default:
      return scaling_solve(prob, config.inner_tol, config.inner_max_iter);
  }
}

CouplingPair initial_couplings(const Dataset& a, const Dataset& b,
                               const SolverConfig& config) {
  switch (config.init) {
    case InitStrategy::Provided: {
      CouplingPair pair = *config.init_couplings;
      pair.validate();
      if (pair.sample_plan.rows() != a.rows() || pair.sample_plan.cols() != b.rows() ||
          pair.feature_plan.rows() != a.cols() || pair.feature_plan.cols() != b.cols()) {
        throw DimensionError("provided initialization has wrong shapes");
      }
      return pair;
    }
    case InitStrategy::WarmStartUcoot:
      return warm_start_coot(a, b, config.warm_lambda1, config.warm_lambda2, config.eps);
    case InitStrategy::ProductUniform:
    default: {
      const double ms_ref = a.sample_weights().mass() * b.sample_weights().mass();
      const double mf_ref = a.feature_weights().mass() * b.feature_weights().mass();
      const double scale = std::sqrt(mf_ref / ms_ref);
      CouplingPair pair;
      pair.sample_plan =
          (a.sample_weights().weights() * b.sample_weights().weights().transpose()) * scale;
      pair.feature_plan =
          (a.feature_weights().weights() * b.feature_weights().weights().transpose()) / scale;
      return pair;
    }
  }
}

}  // namespace

SolveReport bcd_solve(const Dataset& a, const Dataset& b, const SolverConfig& config) {
  config.validate();
  if (!a.sample_weights().strictly_positive() || !b.sample_weights().strictly_positive() ||
      !a.feature_weights().strictly_positive() || !b.feature_weights().strictly_positive()) {
    throw DegenerateError("bcd_solve: weights must be strictly positive; prune zero atoms");
  }
  if (config.balanced_mode()) {
    // Hard marginal constraints additionally need mass-consistent references.
    if (relative_mass_gap(a.sample_weights().mass(), b.sample_weights().mass()) > 1e-9 ||
        relative_mass_gap(a.feature_weights().mass(), b.feature_weights().mass()) > 1e-9 ||
        relative_mass_gap(a.sample_weights().mass(), a.feature_weights().mass()) > 1e-9) {
      throw ConfigError("balanced mode requires equal-mass sample and feature weights");
    }
  }

  SolveReport report;
  CouplingPair plans = initial_couplings(a, b, config);
  const bool balanced = config.balanced_mode();

  double prev_objective = kInf;
  for (int it = 0; it < config.outer_max_iter; ++it) {
    // Feature block.
    UotResult feature = run_inner(local_uot_problem(a, b, plans.sample_plan, config,
                                                    BlockSide::Feature),
                                  config);
    plans.feature_plan = std::move(feature.plan);
    if (!balanced) {
      plans.feature_plan *= std::sqrt(plans.sample_plan.sum() / plans.feature_plan.sum());
    }

    // Sample block.
    UotResult sample = run_inner(local_uot_problem(a, b, plans.feature_plan, config,
                                                   BlockSide::Sample),
                                 config);
    plans.sample_plan = std::move(sample.plan);
    if (!balanced) {
      plans.sample_plan *= std::sqrt(plans.feature_plan.sum() / plans.sample_plan.sum());
      // Equal-mass projection along the objective-invariant scaling orbit.
      const double alpha = std::sqrt(plans.feature_plan.sum() / plans.sample_plan.sum());
      plans.sample_plan *= alpha;
      plans.feature_plan /= alpha;
    }
    report.inner_converged = report.inner_converged && feature.converged && sample.converged;

    const ObjectiveReport objective = evaluate_objective(a, b, plans, config);
    const double current = balanced
                               ? objective.parts.transport_cost +
                                     config.eps * objective.parts.entropic
                               : objective.total;
    report.trace.push_back(current);
    report.outer_iters = it + 1;
    if (it > 0 &&
        std::abs(prev_objective - current) <= config.outer_tol * std::max(1.0, std::abs(prev_objective))) {
      report.converged = true;
      prev_objective = current;
      break;
    }
    prev_objective = current;
  }

  const ObjectiveReport final_objective = evaluate_objective(a, b, plans, config);
  report.parts = final_objective.parts;
  if (balanced) {
    report.value = final_objective.parts.transport_cost;
    report.objective = report.value + config.eps * final_objective.parts.entropic;
  } else {
    report.value = final_objective.parts.transport_cost +
                   config.lambda1 * final_objective.parts.kl1 +
                   config.lambda2 * final_objective.parts.kl2;
    report.objective = final_objective.total;
  }
  report.couplings = std::move(plans);
  return report;
}

CouplingPair warm_start_coot(const Dataset& a, const Dataset& b, double lambda1,
                             double lambda2, double eps) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    throw ConfigError("warm_start_coot requires finite penalty weights");
  }
  SolverConfig config;
  config.lambda1 = lambda1;
  config.lambda2 = lambda2;
  config.eps = eps;
  SolveReport relaxed = bcd_solve(a, b, config);

  CouplingPair pair = std::move(relaxed.couplings);
  const double sample_mass = pair.sample_plan.sum();
  const double feature_mass = pair.feature_plan.sum();
  if (sample_mass <= 0.0 || feature_mass <= 0.0) {
    throw DegenerateError("warm_start_coot: relaxed solution collapsed to zero mass");
  }
  // Balanced-mode couplings carry the reference masses.
  const double target_s =
      std::sqrt(a.sample_weights().mass() * b.sample_weights().mass());
  const double target_f =
      std::sqrt(a.feature_weights().mass() * b.feature_weights().mass());
  pair.sample_plan *= target_s / sample_mass;
  pair.feature_plan *= target_f / feature_mass;
  return pair;
}

}  // namespace ucoot
