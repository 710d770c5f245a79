#pragma once

#include <optional>
#include <vector>

#include "ucoot/types.hpp"
#include "ucoot/uot.hpp"

namespace ucoot {

enum class InnerSolver { Scaling, Nnpr, Auto };

enum class InitStrategy {
  /// Outer products of the reference measures, masses equalized.
  ProductUniform,
  /// Caller-supplied coupling pair.
  Provided,
  /// Solve a relaxed problem first and start from its normalized couplings.
  WarmStartUcoot,
};

/// Configuration for the block-coordinate solver. lambda1 = lambda2 = +inf
/// selects the balanced mode (hard marginal constraints); both-finite selects
/// the relaxed mode. Mixing one finite and one infinite penalty is rejected.
struct SolverConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double eps = 1e-2;
  InnerSolver inner = InnerSolver::Auto;
  int outer_max_iter = 200;
  double outer_tol = 1e-6;
  int inner_max_iter = 1000;
  double inner_tol = 1e-7;
  InitStrategy init = InitStrategy::ProductUniform;
  std::optional<CouplingPair> init_couplings;  // used when init == Provided
  double warm_lambda1 = 100.0;                 // used when init == WarmStartUcoot
  double warm_lambda2 = 100.0;

  bool balanced_mode() const { return std::isinf(lambda1) && std::isinf(lambda2); }

  /// Resolves Auto to Scaling when eps > 0, Nnpr when eps == 0.
  InnerSolver resolved_inner() const;

  void validate() const;
};

/// Objective decomposition at a coupling pair. In balanced mode the KL parts
/// are replaced by marginal feasibility booleans and kl1/kl2 are reported as
/// zero.
struct ObjectiveParts {
  double transport_cost = 0.0;
  double kl1 = 0.0;
  double kl2 = 0.0;
  double entropic = 0.0;
  bool marginals1_feasible = true;
  bool marginals2_feasible = true;
};

struct SolveReport {
  CouplingPair couplings;
  /// The quantity the solver minimizes: value + eps * entropic.
  double objective = 0.0;
  /// Divergence estimate without the entropic regularizer: transport cost
  /// plus the weighted KL penalties (transport cost alone in balanced mode).
  double value = 0.0;
  ObjectiveParts parts;
  int outer_iters = 0;
  bool converged = false;
  bool inner_converged = true;
  std::vector<double> trace;  // objective after each outer iteration
};

/// The n1 x n2 matrix whose (i, j) entry is sum_{k,l} (A_ik - B_jl)^2 plan_kl,
/// computed as A^2 plan1 (+) B^2 plan2 - 2 A plan B^T (three matrix products,
/// never the quadruple loop).
Matrix linearized_cost(const Matrix& a, const Matrix& b, const Matrix& feature_plan);
Matrix linearized_cost(const Dataset& a, const Dataset& b, const Matrix& feature_plan);

enum class BlockSide { Sample, Feature };

/// Builds the inner problem whose solution is the exact block minimizer of
/// the joint objective for the non-fixed plan. The cost is the linearized
/// transport cost shifted by the fixed plan's own penalty inner products
///   lambda_k <log(plan_k# / ref_k), plan_k#> + eps <log(plan / ref), plan>,
/// and the penalties are scaled by the fixed plan's mass. In balanced mode
/// the shift is dropped: it cannot change the constrained minimizer.
UotProblem local_uot_problem(const Dataset& a, const Dataset& b, const Matrix& fixed_plan,
                             const SolverConfig& config, BlockSide which);

/// Full objective decomposition at the given couplings. The returned total is
/// transport + lambda1 kl1 + lambda2 kl2 + eps entropic in relaxed mode; in
/// balanced mode it is the transport cost when the marginals are feasible and
/// +inf otherwise (the entropic part is still reported separately).
struct ObjectiveReport {
  ObjectiveParts parts;
  double total = 0.0;
};
ObjectiveReport evaluate_objective(const Dataset& a, const Dataset& b,
                                   const CouplingPair& couplings, const SolverConfig& config);

/// Block-coordinate descent: alternate feature-plan and sample-plan updates,
/// each an inner UOT solve, rescaling masses after each update and projecting
/// the pair onto equal mass at the end of every outer iteration (the map
/// (p, q) -> (c p, q / c) leaves the objective invariant). Stops on relative
/// objective change <= outer_tol or after outer_max_iter iterations.
SolveReport bcd_solve(const Dataset& a, const Dataset& b, const SolverConfig& config);

/// Runs the relaxed solver with the given finite penalty weights and returns
/// couplings rescaled to the balanced-mode masses, suitable as an
/// initialization for the balanced solver.
CouplingPair warm_start_coot(const Dataset& a, const Dataset& b, double lambda1,
                             double lambda2, double eps);

}  // namespace ucoot
