#pragma once

#include <Eigen/Dense>

namespace chainzono::lp {

/// Default feasibility tolerance on row-normalized constraint residuals.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Dense linear program
///
///   minimize    cost' x
///   subject to  A x = b,  lower <= x <= upper
///
/// All bounds must be finite. An empty `cost` means a pure feasibility
/// problem.
struct Problem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd cost;
};

struct Options {
  double feasibility_tol = kFeasibilityTolerance;
  int max_iterations = 0;  ///< 0 selects a size-dependent default
};

enum class Status { optimal, infeasible, iteration_limit };

struct Result {
  Status status = Status::infeasible;
  Eigen::VectorXd x;        ///< primal point (meaningful when optimal)
  double objective = 0.0;   ///< cost' x
  double residual = 0.0;    ///< max row-normalized |A x - b|
  int iterations = 0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau.
///
/// Rows are normalized by their largest coefficient before solving, so the
/// feasibility tolerance is relative to the row scale. Bland's rule takes
/// over from Dantzig pricing after a run of degenerate pivots.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace chainzono::lp
