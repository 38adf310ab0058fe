#include "seaarm/qp_solver.hpp"

#include <cmath>

namespace seaarm {

void QpProblem::validate() const {
  const Eigen::Index n = P.rows();
  const Eigen::Index m = A.rows();
  if (P.cols() != n || g.size() != n) {
    throw ConfigError("QpProblem: P must be square and match g");
  }
  if ((A.cols() != n && m > 0) || lb.size() != m || ub.size() != m) {
    throw ConfigError("QpProblem: constraint dimensions are inconsistent");
  }
  if (n > 0) {
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw ConfigError("QpProblem: P must be symmetric");
    }
    const Eigen::LDLT<MatX> chol(P);
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if (chol.vectorD().minCoeff() < -1e-10 * scale) {
      throw ConfigError("QpProblem: P must be positive semidefinite");
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(lb[i] <= ub[i])) {
      throw ConfigError("QpProblem: lb > ub on row " + std::to_string(i));
    }
  }
}

void QpSolver::reset() {
  have_warm_ = false;
  warm_x_.resize(0);
  warm_y_.resize(0);
  warm_z_.resize(0);
}

QpSolution QpSolver::solve(const QpProblem& p) {
  p.validate();
  const Eigen::Index n = p.P.rows();
  const Eigen::Index m = p.A.rows();
  const double rho = settings_.rho;
  const double sigma = settings_.sigma;
  const double alpha = settings_.alpha;

  VecX x = VecX::Zero(n), y = VecX::Zero(m), z = VecX::Zero(m);
  if (settings_.warm_start && have_warm_ && warm_x_.size() == n && warm_y_.size() == m) {
    x = warm_x_;
    y = warm_y_;
    z = warm_z_;
  }

  MatX kkt = p.P;
  kkt.diagonal().array() += sigma;
  if (m > 0) {
    kkt.noalias() += rho * p.A.transpose() * p.A;
  }
  Eigen::LDLT<MatX> ldlt(kkt);
  if (ldlt.info() != Eigen::Success) {
    throw ConfigError("QpSolver: KKT matrix factorization failed");
  }

  QpSolution sol;
  VecX y_checkpoint = y;
  VecX ax = (m > 0) ? VecX(p.A * x) : VecX(0);

  auto residuals = [&](double& prim, double& dual) {
    prim = (m > 0) ? (ax - z).cwiseAbs().maxCoeff() : 0.0;
    VecX grad = p.P * x + p.g;
    if (m > 0) {
      grad.noalias() += p.A.transpose() * y;
    }
    dual = (n > 0) ? grad.cwiseAbs().maxCoeff() : 0.0;
  };

  int it = 0;
  for (it = 1; it <= settings_.max_iterations; ++it) {
    VecX rhs = sigma * x - p.g;
    if (m > 0) {
      rhs.noalias() += p.A.transpose() * (rho * z - y);
    }
    const VecX x_tilde = ldlt.solve(rhs);
    const VecX x_next = alpha * x_tilde + (1.0 - alpha) * x;
    if (m > 0) {
      const VecX z_hat = p.A * x_tilde;
      const VecX z_tilde = alpha * z_hat + (1.0 - alpha) * z;
      const VecX z_next = (z_tilde + y / rho).cwiseMax(p.lb).cwiseMin(p.ub);
      y += rho * (z_tilde - z_next);
      z = z_next;
    }
    x = x_next;

    if (it % settings_.check_interval == 0 || it == settings_.max_iterations) {
      if (m > 0) {
        ax.noalias() = p.A * x;
      }
      double prim, dual;
      residuals(prim, dual);
      if (prim <= settings_.eps_abs && dual <= settings_.eps_abs) {
        sol.status = QpStatus::kOptimal;
        sol.primal_residual = prim;
        sol.dual_residual = dual;
        break;
      }
      if (m > 0) {
        // A diverging multiplier along a direction that annihilates A' and
        // separates the boxes certifies primal infeasibility.
        const VecX dy = y - y_checkpoint;
        const double dy_norm = dy.cwiseAbs().maxCoeff();
        if (dy_norm > 1e-12) {
          const double aty = (p.A.transpose() * dy).cwiseAbs().maxCoeff();
          const double support = p.ub.dot(dy.cwiseMax(0.0)) + p.lb.dot(dy.cwiseMin(0.0));
          if (aty <= settings_.eps_rel * dy_norm && support < -settings_.eps_rel * dy_norm) {
            sol.status = QpStatus::kInfeasible;
            sol.primal_residual = prim;
            sol.dual_residual = dual;
            break;
          }
        }
        y_checkpoint = y;
      }
      sol.primal_residual = prim;
      sol.dual_residual = dual;
    }
  }

  sol.iterations = std::min(it, settings_.max_iterations);
  sol.x = x;
  sol.y = y;
  sol.objective = 0.5 * x.dot(p.P * x) + p.g.dot(x);
  if (settings_.warm_start) {
    warm_x_ = x;
    warm_y_ = y;
    warm_z_ = z;
    have_warm_ = true;
  }
  return sol;
}

}  // namespace seaarm
