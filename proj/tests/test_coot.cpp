#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_helpers.hpp"
#include "ucoot/coot.hpp"
#include "ucoot/divergence.hpp"

using namespace ucoot;
using ucoot::testing::linearized_cost_oracle;
using ucoot::testing::random_gaussian;
using ucoot::testing::random_matrix;
using ucoot::testing::random_positive;
using ucoot::testing::uniform_weights;

namespace {

Matrix single(double x) {
  Matrix m(1, 1);
  m(0, 0) = x;
  return m;
}

// Materialized-tensor oracle for the full relaxed objective.
double full_objective_oracle(const Dataset& a, const Dataset& b, const CouplingPair& pair,
                             double lambda1, double lambda2, double eps) {
  const Matrix& ps = pair.sample_plan;
  const Matrix& pf = pair.feature_plan;
  double transport = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      for (Index k = 0; k < a.cols(); ++k) {
        for (Index l = 0; l < b.cols(); ++l) {
          const double dev = a.values()(i, k) - b.values()(j, l);
          transport += dev * dev * ps(i, j) * pf(k, l);
        }
      }
    }
  }

  auto materialized_kl = [](const Vector& x, const Vector& y, const Vector& u,
                            const Vector& v) {
    Vector p(x.size() * y.size()), q(x.size() * y.size());
    Index idx = 0;
    for (Index i = 0; i < x.size(); ++i) {
      for (Index j = 0; j < y.size(); ++j, ++idx) {
        p[idx] = x[i] * y[j];
        q[idx] = u[i] * v[j];
      }
    }
    return kl_mass(p, q);
  };

  const double kl1 = materialized_kl(ps.rowwise().sum(), pf.rowwise().sum(),
                                     a.sample_weights().weights(), a.feature_weights().weights());
  const double kl2 = materialized_kl(ps.colwise().sum(), pf.colwise().sum(),
                                     b.sample_weights().weights(), b.feature_weights().weights());

  // joint entropic term over the fully materialized 4-way tensors
  const Index total = ps.size() * pf.size();
  Vector p(total), q(total);
  Index idx = 0;
  for (Index i = 0; i < ps.rows(); ++i) {
    for (Index j = 0; j < ps.cols(); ++j) {
      for (Index k = 0; k < pf.rows(); ++k) {
        for (Index l = 0; l < pf.cols(); ++l, ++idx) {
          p[idx] = ps(i, j) * pf(k, l);
          q[idx] = a.sample_weights().weights()[i] * b.sample_weights().weights()[j] *
                   a.feature_weights().weights()[k] * b.feature_weights().weights()[l];
        }
      }
    }
  }
  const double entropic = kl_mass(p, q);
  return transport + lambda1 * kl1 + lambda2 * kl2 + eps * entropic;
}

SolverConfig relaxed(double lambda, double eps) {
  SolverConfig config;
  config.lambda1 = config.lambda2 = lambda;
  config.eps = eps;
  config.inner_tol = 1e-9;
  config.inner_max_iter = 5000;
  return config;
}

}  // namespace

TEST_CASE("linearized_cost hand example and zero plan") {
  CHECK(linearized_cost(single(2.0), single(5.0), single(1.0))(0, 0) ==
        doctest::Approx(9.0).epsilon(1e-14));

  std::mt19937_64 rng(2);
  const Matrix a = random_gaussian(3, 2, rng);
  const Matrix b = random_gaussian(4, 3, rng);
  CHECK(linearized_cost(a, b, Matrix(Matrix::Zero(2, 3))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linearized_cost matches the quadruple-loop oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_gaussian(2, 3, rng);
    const Matrix b = random_gaussian(2, 2, rng);
    const Matrix plan = random_matrix(3, 2, rng, 0.0, 1.0);
    const Matrix expected = linearized_cost_oracle(a, b, plan);
    CHECK((linearized_cost(a, b, plan) - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("linearized_cost shape mismatch throws") {
  std::mt19937_64 rng(6);
  CHECK_THROWS_AS(
      linearized_cost(random_gaussian(2, 3, rng), random_gaussian(2, 2, rng),
                      Matrix(Matrix::Zero(2, 2))),
      DimensionError);
}

TEST_CASE("local_uot_problem with vanishing penalties reduces to the linearized cost") {
  std::mt19937_64 rng(8);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(3, 2, rng));
  const Dataset b = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));
  const Matrix fixed = random_matrix(2, 3, rng, 0.1, 1.0);

  SolverConfig config;
  config.lambda1 = config.lambda2 = 0.0;
  config.eps = 0.0;
  const UotProblem prob = local_uot_problem(a, b, fixed, config, BlockSide::Sample);
  CHECK((prob.cost - linearized_cost(a, b, fixed)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(prob.rho1 == 0.0);
  CHECK(prob.eps == 0.0);
}

TEST_CASE("local_uot_problem 1x1 hand evaluation") {
  const Dataset a = Dataset::with_uniform_weights(single(2.0));
  const Dataset b = Dataset::with_uniform_weights(single(5.0));
  SolverConfig config;
  config.lambda1 = config.lambda2 = 1.0;
  config.eps = 0.0;

  const UotProblem prob = local_uot_problem(a, b, single(1.0), config, BlockSide::Sample);
  // all four penalty inner products vanish at unit references
  CHECK(prob.cost(0, 0) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(prob.rho1 == doctest::Approx(1.0));
  CHECK(prob.rho2 == doctest::Approx(1.0));
}

TEST_CASE("local_uot_problem rejects zero-mass fixed plans") {
  std::mt19937_64 rng(10);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(3, 2, rng));
  const Dataset b = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));
  SolverConfig config;
  CHECK_THROWS_AS(local_uot_problem(a, b, Matrix(Matrix::Zero(2, 3)), config, BlockSide::Sample),
                  DegenerateError);
}

TEST_CASE("solving the local problem never increases the full objective") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset a = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));
    const Dataset b = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));
    CouplingPair pair{random_matrix(4, 4, rng, 0.05, 0.5), random_matrix(3, 3, rng, 0.05, 0.5)};

    SolverConfig config = relaxed(0.8, trial % 2 ? 0.05 : 0.0);
    const double before = full_objective_oracle(a, b, pair, 0.8, 0.8, config.eps);

    const UotProblem prob = local_uot_problem(a, b, pair.sample_plan, config, BlockSide::Feature);
    const UotResult inner = config.eps > 0.0 ? scaling_solve(prob, 1e-11, 50000)
                                             : nnpr_solve(prob, 1e-12, 100000);
    pair.feature_plan = inner.plan;
    const double after = full_objective_oracle(a, b, pair, 0.8, 0.8, config.eps);
    CHECK(after <= before + 1e-8 * std::max(1.0, std::abs(before)));
  }
}

TEST_CASE("evaluate_objective matches the quadruple-sum oracle") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 6; ++trial) {
    const Dataset a = Dataset::with_uniform_weights(random_gaussian(3, 2, rng));
    const Dataset b = Dataset::with_uniform_weights(random_gaussian(2, 3, rng));
    const CouplingPair pair{random_matrix(3, 2, rng, 0.0, 0.6),
                            random_matrix(2, 3, rng, 0.0, 0.6)};
    SolverConfig config = relaxed(0.7, 0.2);
    config.lambda2 = 1.3;

    const ObjectiveReport report = evaluate_objective(a, b, pair, config);
    const double expected = full_objective_oracle(a, b, pair, 0.7, 1.3, 0.2);
    CHECK(report.total == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("evaluate_objective of all-zero couplings leaves the reference masses") {
  const Dataset a = Dataset::with_uniform_weights(single(1.0));
  const Dataset b = Dataset::with_uniform_weights(single(2.0));
  const CouplingPair zero{Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  SolverConfig config = relaxed(1.0, 0.0);
  const ObjectiveReport report = evaluate_objective(a, b, zero, config);
  CHECK(report.total == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("evaluate_objective in balanced mode reports transport cost on feasible plans") {
  std::mt19937_64 rng(16);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(3, 2, rng));
  const Dataset b = Dataset::with_uniform_weights(random_gaussian(4, 5, rng));
  // product couplings are feasible for uniform weights
  const CouplingPair product{
      a.sample_weights().weights() * b.sample_weights().weights().transpose(),
      a.feature_weights().weights() * b.feature_weights().weights().transpose()};

  SolverConfig config;
  config.lambda1 = config.lambda2 = kInf;
  config.eps = 0.1;
  const ObjectiveReport report = evaluate_objective(a, b, product, config);
  CHECK(report.parts.marginals1_feasible);
  CHECK(report.parts.marginals2_feasible);
  CHECK(report.total == doctest::Approx(report.parts.transport_cost));

  // destroying mass breaks feasibility
  CouplingPair broken = product;
  broken.sample_plan *= 0.5;
  CHECK(std::isinf(evaluate_objective(a, b, broken, config).total));
}

TEST_CASE("bcd on identical datasets finds a near-perfect alignment") {
  std::mt19937_64 rng(18);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(5, 4, rng));
  SolverConfig config = relaxed(1e3, 1e-3);
  config.outer_max_iter = 100;

  const SolveReport report = bcd_solve(a, a, config);
  CHECK(report.value <= 1e-3);
  CHECK(report.couplings.sample_plan.diagonal().sum() / report.couplings.sample_plan.sum() >=
        0.95);
  CHECK(report.couplings.feature_plan.diagonal().sum() / report.couplings.feature_plan.sum() >=
        0.95);
}

TEST_CASE("bcd recovers row and column permutations") {
  std::mt19937_64 rng(20);
  const Matrix a = random_gaussian(6, 4, rng);
  std::vector<Index> row_perm(6), col_perm(4);
  std::iota(row_perm.begin(), row_perm.end(), 0);
  std::iota(col_perm.begin(), col_perm.end(), 0);
  std::shuffle(row_perm.begin(), row_perm.end(), rng);
  std::shuffle(col_perm.begin(), col_perm.end(), rng);

  Matrix b(6, 4);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 4; ++j) b(i, j) = a(row_perm[i], col_perm[j]);
  }

  SolverConfig config = relaxed(1e3, 1e-3);
  config.outer_max_iter = 100;
  const SolveReport report = bcd_solve(Dataset::with_uniform_weights(a),
                                       Dataset::with_uniform_weights(b), config);
  CHECK(report.value <= 1e-3);

  double support_mass = 0.0;
  for (Index i = 0; i < 6; ++i) support_mass += report.couplings.sample_plan(row_perm[i], i);
  CHECK(support_mass / report.couplings.sample_plan.sum() >= 0.95);
  double feature_support = 0.0;
  for (Index j = 0; j < 4; ++j) feature_support += report.couplings.feature_plan(col_perm[j], j);
  CHECK(feature_support / report.couplings.feature_plan.sum() >= 0.95);
}

TEST_CASE("report objective decomposes as stated") {
  std::mt19937_64 rng(22);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));
  const Dataset b = Dataset::with_uniform_weights(random_gaussian(5, 4, rng));
  SolverConfig config = relaxed(2.0, 0.05);
  config.lambda2 = 0.5;

  const SolveReport report = bcd_solve(a, b, config);
  const double recomposed = report.parts.transport_cost + config.lambda1 * report.parts.kl1 +
                            config.lambda2 * report.parts.kl2 +
                            config.eps * report.parts.entropic;
  CHECK(report.objective == doctest::Approx(recomposed).epsilon(1e-9));
  CHECK(report.value == doctest::Approx(report.objective - config.eps * report.parts.entropic)
                            .epsilon(1e-9));
}

TEST_CASE("bcd trace is non-increasing and masses match after every iteration") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 4; ++trial) {
    const Dataset a = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));
    const Dataset b = Dataset::with_uniform_weights(random_gaussian(5, 4, rng));
    SolverConfig config = relaxed(trial % 2 ? 0.5 : 5.0, trial < 2 ? 0.05 : 0.0);

    const SolveReport report = bcd_solve(a, b, config);
    for (std::size_t i = 1; i < report.trace.size(); ++i) {
      CHECK(report.trace[i] <= report.trace[i - 1] + 1e-8);
    }

    for (int iters = 1; iters <= 3; ++iters) {
      SolverConfig truncated = config;
      truncated.outer_max_iter = iters;
      truncated.outer_tol = 0.0;
      const SolveReport partial = bcd_solve(a, b, truncated);
      const double ms = partial.couplings.sample_plan.sum();
      const double mf = partial.couplings.feature_plan.sum();
      CHECK(std::abs(ms - mf) <= 1e-9 * std::max(ms, mf));
    }
  }
}

TEST_CASE("bcd objective is invariant under simultaneous row permutation") {
  std::mt19937_64 rng(26);
  const Matrix a = random_gaussian(5, 3, rng);
  const Vector weights = random_positive(5, rng, 0.5, 2.0);
  const Dataset b = Dataset::with_uniform_weights(random_gaussian(4, 3, rng));

  std::vector<Index> perm(5);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix a_perm(5, 3);
  Vector w_perm(5);
  for (Index i = 0; i < 5; ++i) {
    a_perm.row(i) = a.row(perm[i]);
    w_perm[i] = weights[perm[i]];
  }

  SolverConfig config = relaxed(1.0, 0.05);
  const SolveReport base =
      bcd_solve(Dataset(a, weights, uniform_weights(3)), b, config);
  const SolveReport permuted =
      bcd_solve(Dataset(a_perm, w_perm, uniform_weights(3)), b, config);
  CHECK(base.objective == doctest::Approx(permuted.objective).epsilon(1e-6));
}

TEST_CASE("large entropic weights pull the sample plan to the scaled product measure") {
  std::mt19937_64 rng(28);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(5, 4, rng));
  const Dataset b = Dataset::with_uniform_weights(random_gaussian(5, 4, rng));

  const double scale = std::sqrt(
      (a.feature_weights().mass() * b.feature_weights().mass()) /
      (a.sample_weights().mass() * b.sample_weights().mass()));
  const Matrix limit =
      scale * (a.sample_weights().weights() * b.sample_weights().weights().transpose());

  double previous_gap = kInf;
  for (double eps : {1.0, 10.0, 100.0}) {
    SolverConfig config = relaxed(1.0, eps);
    config.outer_max_iter = 100;
    const SolveReport report = bcd_solve(a, b, config);
    const double gap = (report.couplings.sample_plan - limit).cwiseAbs().sum();
    CHECK(gap <= previous_gap + 1e-9);
    previous_gap = gap;
    if (eps == 100.0) CHECK(gap <= 0.05);
  }
}

TEST_CASE("warm start on identical inputs is already near-optimal") {
  std::mt19937_64 rng(30);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(5, 4, rng));

  SolverConfig config;
  config.lambda1 = config.lambda2 = kInf;
  config.eps = 1e-2;
  config.init = InitStrategy::WarmStartUcoot;
  config.inner_tol = 1e-9;
  config.inner_max_iter = 5000;
  const SolveReport report = bcd_solve(a, a, config);
  CHECK(report.converged);
  CHECK(report.outer_iters <= 3);
}

TEST_CASE("warm start requires finite penalties") {
  std::mt19937_64 rng(32);
  const Dataset a = Dataset::with_uniform_weights(random_gaussian(3, 3, rng));
  CHECK_THROWS_AS(warm_start_coot(a, a, kInf, kInf, 1e-2), ConfigError);
}

TEST_CASE("solver configuration validation") {
  SolverConfig config;

  SUBCASE("balanced mode needs entropic smoothing") {
    config.lambda1 = config.lambda2 = kInf;
    config.eps = 0.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("auto resolves by eps") {
    config.eps = 0.5;
    CHECK(config.resolved_inner() == InnerSolver::Scaling);
    config.eps = 0.0;
    CHECK(config.resolved_inner() == InnerSolver::Nnpr);
  }
  SUBCASE("semi-relaxed penalties are rejected") {
    config.lambda1 = kInf;
    config.lambda2 = 1.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("nnpr cannot run balanced mode") {
    config.lambda1 = config.lambda2 = kInf;
    config.eps = 0.1;
    config.inner = InnerSolver::Nnpr;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("scaling needs eps > 0") {
    config.eps = 0.0;
    config.inner = InnerSolver::Scaling;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("nonpositive lambda rejected") {
    config.lambda1 = 0.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
}
