#include "ucoot/uot.hpp"

#include <cmath>

#include "ucoot/divergence.hpp"

namespace ucoot {

void UotProblem::validate() const {
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw DimensionError("uot: cost is " + std::to_string(cost.rows()) + "x" +
                         std::to_string(cost.cols()) + " but marginals have lengths " +
                         std::to_string(mu.size()) + ", " + std::to_string(nu.size()));
  }
  if (!cost.allFinite()) throw ConfigError("uot: cost must be finite");
  if (mu.size() == 0 || nu.size() == 0) throw DimensionError("uot: empty marginals");
  if (mu.minCoeff() <= 0.0 || nu.minCoeff() <= 0.0) {
    throw ConfigError("uot: marginals must be strictly positive (prune zero-weight atoms)");
  }
  if (std::isnan(rho1) || std::isnan(rho2) || rho1 < 0.0 || rho2 < 0.0) {
    throw ConfigError("uot: rho must be in [0, +inf]");
  }
  if (!std::isfinite(eps) || eps < 0.0) throw ConfigError("uot: eps must be finite and >= 0");
  if ((std::isinf(rho1) || std::isinf(rho2)) && eps <= 0.0) {
    throw ConfigError("uot: infinite rho requires eps > 0; eps = 0 needs both rho finite");
  }
}

namespace {

// Row-wise max-stabilized log(sum_j exp(M_ij)).
Vector logsumexp_rows(const Matrix& m) {
  Vector out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    out[i] = mx + std::log((m.row(i).array() - mx).exp().sum());
  }
  return out;
}

inline double pow0(double x, double e) {
  if (e == 0.0) return 1.0;  // 0^0 = 1
  return std::pow(x, e);
}

}  // namespace

UotResult scaling_solve(const UotProblem& prob, double tol, int max_iter) {
  prob.validate();
  if (prob.eps <= 0.0) throw ConfigError("scaling_solve requires eps > 0");
  if (max_iter < 1) throw ConfigError("scaling_solve: max_iter must be >= 1");

  const Index m = prob.mu.size(), n = prob.nu.size();
  const Matrix log_kernel = (-prob.cost / prob.eps).eval();
  const Vector log_mu = prob.mu.array().log().matrix();
  const Vector log_nu = prob.nu.array().log().matrix();
  const double e1 = std::isinf(prob.rho1) ? 1.0 : prob.rho1 / (prob.rho1 + prob.eps);
  const double e2 = std::isinf(prob.rho2) ? 1.0 : prob.rho2 / (prob.rho2 + prob.eps);

  Vector f = Vector::Zero(m), g = Vector::Zero(n);
  UotResult result;
  for (int it = 0; it < max_iter; ++it) {
    const Vector f_new =
        -e1 * logsumexp_rows(log_kernel.rowwise() + (g + log_nu).transpose());
    const Vector g_new =
        -e2 * logsumexp_rows((log_kernel.colwise() + (f_new + log_mu)).transpose());
    const double delta = std::max((f_new - f).cwiseAbs().maxCoeff(),
                                  (g_new - g).cwiseAbs().maxCoeff());
    f = f_new;
    g = g_new;
    result.iterations = it + 1;
    if (delta <= tol) {
      result.converged = true;
      break;
    }
  }

  result.plan = ((log_kernel.colwise() + (f + log_mu)).rowwise() +
                 (g + log_nu).transpose())
                    .array()
                    .exp()
                    .matrix();
  return result;
}

UotResult nnpr_solve(const UotProblem& prob, double tol, int max_iter,
                     const std::optional<Matrix>& init) {
  prob.validate();
  if (std::isinf(prob.rho1) || std::isinf(prob.rho2)) {
    throw ConfigError("nnpr_solve requires both rho finite");
  }
  if (max_iter < 1) throw ConfigError("nnpr_solve: max_iter must be >= 1");
  const double lam = prob.rho1 + prob.rho2 + prob.eps;
  if (lam <= 0.0) throw ConfigError("nnpr_solve requires rho1 + rho2 + eps > 0");

  const double r = prob.eps / lam;
  const double l1 = prob.rho1 / lam, l2 = prob.rho2 / lam;
  const Index m = prob.mu.size(), n = prob.nu.size();

  // Fixed factor mu^(l1+r) (x) nu^(l2+r) . exp(-C/lam).
  const Vector mu_pow = prob.mu.array().pow(l1 + r).matrix();
  const Vector nu_pow = prob.nu.array().pow(l2 + r).matrix();
  const Matrix gain =
      (mu_pow * nu_pow.transpose()).array() * (-prob.cost / lam).array().exp();

  Matrix plan;
  if (init.has_value()) {
    if (init->rows() != m || init->cols() != n) {
      throw DimensionError("nnpr_solve: initialization shape mismatch");
    }
    if (!init->allFinite() || init->minCoeff() <= 0.0) {
      throw ConfigError("nnpr_solve: initialization must be strictly positive");
    }
    plan = *init;
  } else {
    plan = (prob.mu * prob.nu.transpose()) / std::sqrt(prob.mu.sum() * prob.nu.sum());
  }

  UotResult result;
  Matrix next(m, n);
  for (int it = 0; it < max_iter; ++it) {
    const Vector row_sums = plan.rowwise().sum();
    const Vector col_sums = plan.colwise().sum();
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) {
        const double num = pow0(plan(i, j), l1 + l2);
        // num > 0 implies the marginal sums are > 0, so the quotient is safe;
        // num == 0 encodes the 0/0 = 0 convention.
        const double base =
            (num == 0.0) ? 0.0 : num / (pow0(row_sums[i], l1) * pow0(col_sums[j], l2));
        next(i, j) = base * gain(i, j);
      }
    }
    const double delta = (next - plan).cwiseAbs().maxCoeff();
    plan.swap(next);
    result.iterations = it + 1;
    if (delta <= tol) {
      result.converged = true;
      break;
    }
  }
  result.plan = std::move(plan);
  return result;
}

double uot_objective(const UotProblem& prob, const Matrix& plan) {
  if (plan.rows() != prob.mu.size() || plan.cols() != prob.nu.size()) {
    throw DimensionError("uot_objective: plan shape mismatch");
  }
  double value = (prob.cost.array() * plan.array()).sum();
  if (std::isfinite(prob.rho1)) {
    value += prob.rho1 * kl_mass(Vector(plan.rowwise().sum()), prob.mu);
  }
  if (std::isfinite(prob.rho2)) {
    value += prob.rho2 * kl_mass(Vector(plan.colwise().sum()), prob.nu);
  }
  if (prob.eps > 0.0) {
    value += prob.eps * kl_mass_outer(plan, prob.mu, prob.nu);
  }
  return value;
}

}  // namespace ucoot
