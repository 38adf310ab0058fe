#pragma once

#include "seaarm/types.hpp"

namespace seaarm {

/// Dense convex QP:  min 1/2 x'Px + g'x  subject to  lb <= Ax <= ub.
struct QpProblem {
  MatX P;
  VecX g;
  MatX A;
  VecX lb, ub;

  void validate() const;
};

enum class QpStatus { kOptimal, kMaxIterations, kInfeasible };

struct QpSolution {
  VecX x;
  VecX y;  ///< multipliers for the box rows
  double objective{0.0};
  int iterations{0};
  QpStatus status{QpStatus::kMaxIterations};
  double primal_residual{0.0};
  double dual_residual{0.0};
};

struct QpSettings {
  double rho{0.1};            ///< constraint penalty
  double sigma{1e-6};         ///< primal regularization
  double alpha{1.6};          ///< over-relaxation
  int max_iterations{4000};
  double eps_abs{1e-6};       ///< residual tolerance for optimality
  double eps_rel{1e-6};       ///< scaling term in the infeasibility test
  int check_interval{25};
  bool warm_start{true};
};

/// Operator-splitting solver with optional warm starting across calls. The
/// iterate sequence is a deterministic function of the problem, the settings
/// and the stored warm-start state.
class QpSolver {
 public:
  QpSolver() = default;
  explicit QpSolver(const QpSettings& settings) : settings_(settings) {}

  QpSolution solve(const QpProblem& problem);

  /// Drop the warm-start state; the next solve starts from zero.
  void reset();

  const QpSettings& settings() const { return settings_; }

 private:
  QpSettings settings_;
  VecX warm_x_, warm_y_, warm_z_;
  bool have_warm_{false};
};

}  // namespace seaarm
