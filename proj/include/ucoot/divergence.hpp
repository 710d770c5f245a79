#pragma once

#include "ucoot/types.hpp"

namespace ucoot {

/// KL divergence between unnormalized measures,
///   kl_mass(p, q) = sum_i p_i log(p_i / q_i) - m(p) + m(q),
/// with the 0 log 0 = 0 convention. Returns +infinity when some p_i > 0 has
/// q_i = 0; +infinity is a value here, not an error.
double kl_mass(const Vector& p, const Vector& q);
double kl_mass(const Measure& p, const Measure& q);

/// KL of a plan against the outer product of two vectors, KL(P | u (x) v),
/// computed in O(mn) without materializing the product.
double kl_mass_outer(const Matrix& plan, const Vector& u, const Vector& v);

/// sum_i p_i log(p_i / q_i), the integral part of kl_mass without the mass
/// correction. Same conventions.
double kl_log_term(const Vector& p, const Vector& q);
double kl_log_term_outer(const Matrix& plan, const Vector& u, const Vector& v);

/// KL of the product measure ps1 (x) pf1 against mu_s (x) mu_f, via
///   KL(a (x) b | u (x) v) = m(b) KL(a|u) + m(a) KL(b|v)
///                           + (m(a) - m(u)) (m(b) - m(v)).
/// The decomposition is validated against materialized outer products in the
/// test suite.
double tensor_kl(const Measure& ps1, const Measure& pf1, const Measure& mu_s,
                 const Measure& mu_f);
double tensor_kl(const Vector& a, const Vector& b, const Vector& u, const Vector& v);

}  // namespace ucoot
