#include "ucoot/divergence.hpp"

#include <cmath>

namespace ucoot {

namespace {

// Accumulates sum p log(p/q) over one (p, q) pair. Returns +inf on an
// absolute-continuity violation.
inline bool accumulate_plogpq(double p, double q, double& acc) {
  if (p == 0.0) return true;
  if (q <= 0.0) return false;
  acc += p * std::log(p / q);
  return true;
}

}  // namespace

double kl_log_term(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw DimensionError("kl: length mismatch " + std::to_string(p.size()) + " vs " +
                         std::to_string(q.size()));
  }
  double acc = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (!accumulate_plogpq(p[i], q[i], acc)) return kInf;
  }
  return acc;
}

double kl_log_term_outer(const Matrix& plan, const Vector& u, const Vector& v) {
  if (plan.rows() != u.size() || plan.cols() != v.size()) {
    throw DimensionError("kl: plan shape does not match reference lengths");
  }
  double acc = 0.0;
  for (Index i = 0; i < plan.rows(); ++i) {
    for (Index j = 0; j < plan.cols(); ++j) {
      if (!accumulate_plogpq(plan(i, j), u[i] * v[j], acc)) return kInf;
    }
  }
  return acc;
}

double kl_mass(const Vector& p, const Vector& q) {
  const double log_term = kl_log_term(p, q);
  if (std::isinf(log_term)) return kInf;
  return log_term - p.sum() + q.sum();
}

double kl_mass(const Measure& p, const Measure& q) {
  const double log_term = kl_log_term(p.weights(), q.weights());
  if (std::isinf(log_term)) return kInf;
  return log_term - p.mass() + q.mass();
}

double kl_mass_outer(const Matrix& plan, const Vector& u, const Vector& v) {
  const double log_term = kl_log_term_outer(plan, u, v);
  if (std::isinf(log_term)) return kInf;
  return log_term - plan.sum() + u.sum() * v.sum();
}

double tensor_kl(const Vector& a, const Vector& b, const Vector& u, const Vector& v) {
  if (a.size() != u.size() || b.size() != v.size()) {
    throw DimensionError("tensor_kl: length mismatch");
  }
  const double ma = a.sum(), mb = b.sum();
  // A zero factor makes the outer product zero no matter the other factor.
  if (ma == 0.0 || mb == 0.0) return u.sum() * v.sum();
  const double kl_a = kl_mass(a, u);
  const double kl_b = kl_mass(b, v);
  if (std::isinf(kl_a) || std::isinf(kl_b)) return kInf;
  return mb * kl_a + ma * kl_b + (ma - u.sum()) * (mb - v.sum());
}

double tensor_kl(const Measure& ps1, const Measure& pf1, const Measure& mu_s,
                 const Measure& mu_f) {
  return tensor_kl(ps1.weights(), pf1.weights(), mu_s.weights(), mu_f.weights());
}

}  // namespace ucoot
