#include "chainzono/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "chainzono/error.hpp"

namespace chainzono::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-11;
constexpr int kDegenerateRunBeforeBland = 40;

enum class PhaseOutcome { optimal, unbounded, iteration_limit };

// Tableau over shifted variables y = x - lower, 0 <= y <= upper - lower.
// Columns [0, n) are structural, [n, n + m) are phase-one artificials.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& rows, const Eigen::VectorXd& rhs,
          const Eigen::VectorXd& span)
      : m_(rows.rows()),
        n_(rows.cols()),
        table_(m_, n_ + m_),
        beta_(rhs),
        upper_(n_ + m_, kInf),
        at_upper_(n_ + m_, 0),
        basis_(m_) {
    table_.leftCols(n_) = rows;
    table_.rightCols(m_).setIdentity();
    for (Eigen::Index j = 0; j < n_; ++j) upper_[j] = span[j];
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  PhaseOutcome run(const Eigen::VectorXd& cost, int max_iterations,
                   int& iterations) {
    int degenerate_run = 0;
    while (true) {
      if (iterations >= max_iterations) return PhaseOutcome::iteration_limit;
      const Eigen::VectorXd xb = basic_values();

      Eigen::VectorXd cb(m_);
      for (Eigen::Index i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
      const Eigen::VectorXd reduced = cost - table_.transpose() * cb;

      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      Eigen::Index entering = -1;
      double best_score = 0.0;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (is_basic(j) || upper_[j] <= 0.0) continue;
        double score = 0.0;
        if (!at_upper_[j] && reduced[j] < -kReducedCostTol) score = -reduced[j];
        if (at_upper_[j] && reduced[j] > kReducedCostTol) score = reduced[j];
        if (score <= 0.0) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (score > best_score) {
          best_score = score;
          entering = j;
        }
      }
      if (entering < 0) return PhaseOutcome::optimal;

      const double dir = at_upper_[entering] ? -1.0 : 1.0;
      double step = upper_[entering];
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      double leave_alpha = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double alpha = dir * table_(i, entering);
        double limit = kInf;
        bool to_upper = false;
        if (alpha > kPivotTol) {
          limit = std::max(0.0, xb[i]) / alpha;
        } else if (alpha < -kPivotTol && std::isfinite(upper_[basis_[i]])) {
          limit = std::max(0.0, upper_[basis_[i]] - xb[i]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (limit < step) {
          take = true;
        } else if (limit == step && leave_row >= 0) {
          take = bland ? basis_[i] < basis_[leave_row]
                       : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          step = limit;
          leave_row = i;
          leave_to_upper = to_upper;
          leave_alpha = alpha;
        }
      }
      if (!std::isfinite(step)) return PhaseOutcome::unbounded;

      degenerate_run = step <= 1e-14 ? degenerate_run + 1 : 0;
      ++iterations;
      if (leave_row < 0) {
        at_upper_[entering] = !at_upper_[entering];
        continue;
      }
      const Eigen::Index leaving = basis_[leave_row];
      pivot(leave_row, entering);
      at_upper_[leaving] = leave_to_upper ? 1 : 0;
      at_upper_[entering] = 0;
    }
  }

  // Values of the structural variables at the current vertex.
  Eigen::VectorXd structural_values() const {
    Eigen::VectorXd y(n_);
    for (Eigen::Index j = 0; j < n_; ++j) y[j] = at_upper_[j] ? upper_[j] : 0.0;
    const Eigen::VectorXd xb = basic_values();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = std::clamp(xb[i], 0.0, upper_[basis_[i]]);
    }
    return y;
  }

  void freeze_artificials() {
    for (Eigen::Index j = n_; j < n_ + m_; ++j) {
      upper_[j] = 0.0;
      at_upper_[j] = 0;
    }
  }

 private:
  bool is_basic(Eigen::Index j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  Eigen::VectorXd basic_values() const {
    Eigen::VectorXd xb = beta_;
    for (Eigen::Index j = 0; j < n_ + m_; ++j) {
      if (at_upper_[j] && !is_basic(j)) xb -= table_.col(j) * upper_[j];
    }
    return xb;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    const double p = table_(row, col);
    table_.row(row) /= p;
    beta_[row] /= p;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = table_(i, col);
      if (f == 0.0) continue;
      table_.row(i) -= f * table_.row(row);
      beta_[i] -= f * beta_[row];
    }
    basis_[row] = col;
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::MatrixXd table_;
  Eigen::VectorXd beta_;
  std::vector<double> upper_;
  std::vector<char> at_upper_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Result solve(const Problem& problem, const Options& options) {
  const Eigen::Index n = problem.lower.size();
  const Eigen::Index m_in = problem.A.rows();
  if (problem.upper.size() != n || problem.A.cols() != n ||
      problem.b.size() != m_in ||
      (problem.cost.size() != 0 && problem.cost.size() != n)) {
    throw InvalidArgument("lp::solve: inconsistent problem dimensions");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(problem.lower[j]) || !std::isfinite(problem.upper[j]) ||
        problem.lower[j] > problem.upper[j]) {
      throw InvalidArgument("lp::solve: bounds must be finite and ordered");
    }
  }

  const double tol = options.feasibility_tol;
  const Eigen::VectorXd span = problem.upper - problem.lower;
  const Eigen::VectorXd shifted_rhs = problem.b - problem.A * problem.lower;

  // Normalize rows, drop empty ones, and make every right-hand side
  // nonnegative so the artificial basis starts feasible.
  std::vector<Eigen::Index> kept;
  std::vector<double> scale;
  for (Eigen::Index i = 0; i < m_in; ++i) {
    const double s = problem.A.row(i).cwiseAbs().maxCoeff();
    if (s == 0.0) {
      if (std::abs(shifted_rhs[i]) > tol) return Result{Status::infeasible, {}, 0.0, std::abs(shifted_rhs[i]), 0};
      continue;
    }
    kept.push_back(i);
    scale.push_back(s);
  }
  const auto m = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd rows(m, n);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double sign = shifted_rhs[kept[r]] < 0.0 ? -1.0 : 1.0;
    rows.row(r) = problem.A.row(kept[r]) * (sign / scale[r]);
    rhs[r] = shifted_rhs[kept[r]] * (sign / scale[r]);
  }

  const int max_iterations = options.max_iterations > 0
                                 ? options.max_iterations
                                 : static_cast<int>(50 * (n + 2 * m) + 100);
  Result result;
  Tableau tableau(rows, rhs, span);

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  if (tableau.run(phase1_cost, max_iterations, result.iterations) ==
      PhaseOutcome::iteration_limit) {
    result.status = Status::iteration_limit;
    return result;
  }

  Eigen::VectorXd y = tableau.structural_values();
  result.residual = m > 0 ? (rows * y - rhs).cwiseAbs().maxCoeff() : 0.0;
  if (result.residual > tol) {
    result.status = Status::infeasible;
    return result;
  }

  if (problem.cost.size() == n && n > 0 && problem.cost.cwiseAbs().maxCoeff() > 0.0) {
    tableau.freeze_artificials();
    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
    phase2_cost.head(n) = problem.cost / problem.cost.cwiseAbs().maxCoeff();
    const PhaseOutcome outcome =
        tableau.run(phase2_cost, max_iterations, result.iterations);
    if (outcome == PhaseOutcome::iteration_limit) {
      result.status = Status::iteration_limit;
      return result;
    }
    if (outcome == PhaseOutcome::unbounded) {
      // Unreachable with finite bounds.
      throw InvalidArgument("lp::solve: unbounded program with finite bounds");
    }
    y = tableau.structural_values();
    result.residual = m > 0 ? (rows * y - rhs).cwiseAbs().maxCoeff() : 0.0;
  }

  result.status = Status::optimal;
  result.x = problem.lower + y;
  result.objective = problem.cost.size() == n ? problem.cost.dot(result.x) : 0.0;
  return result;
}

}  // namespace chainzono::lp
