#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jcc {

// Convex QP with a separable (diagonal) quadratic term:
//   minimize   sum_i quad[i]*x[i]^2 + lin[i]*x[i] + constant
//   subject to a * x <= b
// quad must be entrywise nonnegative. Variable bounds are folded into rows.
struct QuadraticProgram {
  Eigen::VectorXd quad;
  Eigen::VectorXd lin;
  double constant = 0.0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<std::string> row_labels;  // optional, used in diagnostics

  int num_vars() const { return static_cast<int>(lin.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }
  std::string label(int row) const {
    return row >= 0 && row < static_cast<int>(row_labels.size())
               ? row_labels[row]
               : "row " + std::to_string(row);
  }
};

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit };

// Infeasibility is a value, not an exception: over-tightened instances are
// expected and callers branch on status.
struct QpSolution {
  QpStatus status = QpStatus::kIterationLimit;
  Eigen::VectorXd x;
  // Multipliers mu >= 0 with 2*diag(quad)*x + lin + a^T*mu = 0 at optimum.
  Eigen::VectorXd dual;
  double objective = 0.0;
  double primal_residual = 0.0;  // max over rows of (a*x - b)_+
  double dual_residual = 0.0;    // stationarity, inf-norm
  double comp_slackness = 0.0;   // |mu^T (a*x - b)|
  int iterations = 0;
  bool polished = false;
  // When infeasible: rows still violated at the least-infeasible point.
  std::vector<int> violated_rows;
};

struct QpSettings {
  // Negative feas_tol means "use 1e-8 * (1 + ||b||_inf)".
  double feas_tol = -1.0;
  double opt_tol = 1e-8;
  int max_iter = 100000;
  bool diagnose_infeasibility = true;
};

// Operator-splitting (ADMM) solver with an active-set polishing step that
// recovers tight KKT residuals. Deterministic: identical inputs give a
// bit-identical iterate trajectory and solution.
QpSolution solve(const QuadraticProgram& qp, const QpSettings& settings = {});

}  // namespace jcc
