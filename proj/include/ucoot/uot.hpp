#pragma once

#include <optional>

#include "ucoot/types.hpp"

namespace ucoot {

/// An unbalanced entropic OT problem
///
///   min_{P >= 0}  <C, P> + rho1 KL(P 1 | mu) + rho2 KL(P^T 1 | nu)
///                 + eps KL(P | mu (x) nu),
///
/// with rho_k in [0, +inf] (+inf pins the corresponding marginal) and
/// eps >= 0. Marginals must be strictly positive entrywise; zero-weight atoms
/// are the caller's job to prune beforehand.
struct UotProblem {
  Matrix cost;
  Vector mu;
  Vector nu;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double eps = 1e-2;

  void validate() const;
};

struct UotResult {
  Matrix plan;
  int iterations = 0;
  bool converged = false;
};

/// Alternating log-domain potential updates (generalized Sinkhorn).
///
/// The f-update is f = -rho1/(rho1+eps) * logsumexp_j(g_j + log nu_j - C_.j/eps),
/// symmetrically for g, with the exponent taken as 1 when rho = +inf. All
/// reductions are max-stabilized, which keeps the iteration usable down to
/// eps ~ 1e-5. Requires eps > 0. Convergence is declared when the sup-norm
/// change of (f, g) drops below tol; running out of iterations flags the
/// result instead of failing.
UotResult scaling_solve(const UotProblem& prob, double tol = 1e-7, int max_iter = 1000);

/// Multiplicative fixed-point update (non-negative penalized regression):
/// with lam = rho1 + rho2 + eps, r = eps/lam, lam_k = rho_k/lam,
///
///   P <- P^(lam1+lam2) / (P1^lam1 (x) P^T1^lam2)
///        . (mu^(lam1+r) (x) nu^(lam2+r)) . exp(-C/lam),
///
/// elementwise, with 0^0 = 1 and 0/0 = 0 so that entries which reach zero
/// stay zero. Valid for eps >= 0 but requires both rho finite. The default
/// initialization is mu (x) nu scaled to mass sqrt(m(mu) m(nu)); a provided
/// initialization must be strictly positive.
UotResult nnpr_solve(const UotProblem& prob, double tol = 1e-7, int max_iter = 1000,
                     const std::optional<Matrix>& init = std::nullopt);

/// Objective value of a plan under the problem above. Infinite-rho penalties
/// contribute zero (they are constraints, not costs); eps = 0 drops the
/// entropic term.
double uot_objective(const UotProblem& prob, const Matrix& plan);

}  // namespace ucoot
