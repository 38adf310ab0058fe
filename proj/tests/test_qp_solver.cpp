#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/qp_oracle.hpp"

using namespace seaarm;

TEST_CASE("unconstrained problems reduce to the linear system solution") {
  QpProblem p;
  p.P = (MatX(2, 2) << 4, 1, 1, 3).finished();
  p.g = (VecX(2) << -1, -2).finished();
  p.A = MatX(0, 2);
  p.lb = VecX(0);
  p.ub = VecX(0);
  QpSolver solver;
  const QpSolution sol = solver.solve(p);
  CHECK(sol.status == QpStatus::kOptimal);
  const VecX expected = p.P.ldlt().solve(-p.g);
  CHECK((sol.x - expected).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(sol.dual_residual <= 1e-6);
}

TEST_CASE("a box-constrained separable problem clamps its unconstrained optimum") {
  // min 1/2 ||x - c||^2 with bounds; solution is clamp(c).
  const int n = 4;
  QpProblem p;
  p.P = MatX::Identity(n, n);
  const VecX c = (VecX(n) << 2.0, -3.0, 0.25, 0.9).finished();
  p.g = -c;
  p.A = MatX::Identity(n, n);
  p.lb = VecX::Constant(n, -1.0);
  p.ub = VecX::Constant(n, 1.0);
  QpSolver solver;
  const QpSolution sol = solver.solve(p);
  CHECK(sol.status == QpStatus::kOptimal);
  const VecX expected = c.cwiseMax(p.lb).cwiseMin(p.ub);
  CHECK((sol.x - expected).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("equality rows are honored") {
  QpProblem p;
  p.P = MatX::Identity(2, 2);
  p.g = (VecX(2) << 0, 0).finished();
  p.A = (MatX(1, 2) << 1, 1).finished();
  p.lb = VecX::Constant(1, 1.0);
  p.ub = VecX::Constant(1, 1.0);
  QpSolver solver;
  const QpSolution sol = solver.solve(p);
  CHECK(sol.status == QpStatus::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("optimal solutions satisfy the stated feasibility and stationarity bounds") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const QpProblem p = test::random_feasible_qp(rng, 12, 15);
    QpSolver solver;
    const QpSolution sol = solver.solve(p);
    REQUIRE(sol.status == QpStatus::kOptimal);
    const VecX ax = p.A * sol.x;
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      CHECK(ax[i] >= p.lb[i] - 1e-6);
      CHECK(ax[i] <= p.ub[i] + 1e-6);
    }
    const VecX stationarity = p.P * sol.x + p.g + p.A.transpose() * sol.y;
    CHECK(stationarity.cwiseAbs().maxCoeff() <= 1e-6);
    // Multiplier signs: positive only at the upper bound, negative only at
    // the lower bound.
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      if (sol.y[i] > 1e-5) {
        CHECK(ax[i] >= p.ub[i] - 1e-4);
      } else if (sol.y[i] < -1e-5) {
        CHECK(ax[i] <= p.lb[i] + 1e-4);
      }
    }
  }
}

TEST_CASE("solutions agree with a projected-gradient oracle") {
  std::mt19937_64 rng(47);
  QpSettings settings;
  settings.eps_abs = 1e-9;
  for (int trial = 0; trial < 12; ++trial) {
    const QpProblem p = test::random_feasible_qp(rng, 10, 12);
    QpSolver solver(settings);
    const QpSolution sol = solver.solve(p);
    REQUIRE(sol.status == QpStatus::kOptimal);
    const VecX oracle = test::solve_projected_gradient(p);
    CHECK((sol.x - oracle).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("the iterate sequence is deterministic and warm starts converge faster") {
  std::mt19937_64 rng(53);
  const QpProblem p = test::random_feasible_qp(rng, 20, 24);
  QpSolver a, b;
  const QpSolution sa = a.solve(p);
  const QpSolution sb = b.solve(p);
  CHECK(sa.iterations == sb.iterations);
  CHECK((sa.x - sb.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sa.primal_residual == sb.primal_residual);

  // Re-solving a perturbed problem from the stored state must not take more
  // iterations than solving it cold.
  QpProblem shifted = p;
  shifted.g.array() += 0.01;
  const QpSolution warm = a.solve(shifted);
  QpSolver cold;
  const QpSolution from_zero = cold.solve(shifted);
  CHECK(warm.status == QpStatus::kOptimal);
  CHECK(warm.iterations <= from_zero.iterations);

  // reset() must reproduce the cold sequence exactly.
  a.reset();
  const QpSolution reset_run = a.solve(shifted);
  CHECK(reset_run.iterations == from_zero.iterations);
  CHECK((reset_run.x - from_zero.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("disjoint slabs are reported infeasible") {
  QpProblem p;
  p.P = MatX::Identity(1, 1);
  p.g = VecX::Zero(1);
  p.A = (MatX(2, 1) << 1, 1).finished();
  p.lb = (VecX(2) << -10.0, 1.0).finished();
  p.ub = (VecX(2) << -1.0, 10.0).finished();
  QpSolver solver;
  const QpSolution sol = solver.solve(p);
  CHECK(sol.status == QpStatus::kInfeasible);
  CHECK(sol.iterations < solver.settings().max_iterations);
}

TEST_CASE("problem validation catches malformed inputs") {
  QpProblem p;
  p.P = (MatX(2, 2) << 1, 0.5, 0, 1).finished();  // not symmetric
  p.g = VecX::Zero(2);
  p.A = MatX(0, 2);
  p.lb = VecX(0);
  p.ub = VecX(0);
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p.P = -MatX::Identity(2, 2);  // not positive semidefinite
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p.P = MatX::Identity(2, 2);
  p.A = MatX::Ones(1, 2);
  p.lb = VecX::Constant(1, 2.0);
  p.ub = VecX::Constant(1, 1.0);  // crossed bounds
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p.lb = VecX::Constant(1, 0.0);
  p.ub = VecX::Constant(1, 1.0);
  CHECK_NOTHROW(p.validate());

  p.g = VecX::Zero(3);  // wrong size
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("zero-width boxes at the unconstrained optimum terminate immediately") {
  QpProblem p;
  p.P = MatX::Identity(2, 2);
  p.g = (VecX(2) << -1, -1).finished();
  p.A = MatX::Identity(2, 2);
  p.lb = VecX::Constant(2, 1.0);
  p.ub = VecX::Constant(2, 1.0);
  QpSolver solver;
  const QpSolution sol = solver.solve(p);
  CHECK(sol.status == QpStatus::kOptimal);
  CHECK((sol.x - VecX::Constant(2, 1.0)).cwiseAbs().maxCoeff() < 1e-6);
}
