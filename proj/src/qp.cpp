#include "jcc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jcc/errors.hpp"

namespace jcc {

namespace {

constexpr double kSigma = 1e-6;       // proximal weight on x
constexpr double kRelax = 1.6;        // over-relaxation
constexpr int kCheckEvery = 25;       // residual/certificate cadence
constexpr int kRhoAdaptEvery = 100;   // rho update cadence
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;

void validate(const QuadraticProgram& qp) {
  const int n = qp.num_vars();
  const int m = qp.num_rows();
  if (qp.quad.size() != n) throw ValidationError("qp: quad/lin size mismatch");
  if (qp.a.rows() != m || (m > 0 && qp.a.cols() != n)) {
    throw ValidationError("qp: constraint matrix shape mismatch");
  }
  if (n == 0) throw ValidationError("qp: no variables");
  if ((qp.quad.array() < 0.0).any()) {
    throw ValidationError("qp: quadratic coefficients must be >= 0");
  }
  if (!qp.quad.allFinite() || !qp.lin.allFinite() ||
      (m > 0 && (!qp.a.allFinite() || !qp.b.allFinite()))) {
    throw ValidationError("qp: non-finite entries");
  }
}

double objective_value(const QuadraticProgram& qp, const Eigen::VectorXd& x) {
  return qp.quad.dot(x.cwiseProduct(x)) + qp.lin.dot(x) + qp.constant;
}

struct Residuals {
  double primal = 0.0;  // max (a*x-b)_+
  double dual = 0.0;    // ||2Qx + c + A^T mu||_inf
  double comp = 0.0;    // |mu^T (a*x - b)|
};

Residuals kkt_residuals(const QuadraticProgram& qp, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& mu) {
  Residuals r;
  Eigen::VectorXd grad = 2.0 * qp.quad.cwiseProduct(x) + qp.lin;
  if (qp.num_rows() > 0) {
    Eigen::VectorXd slack = qp.a * x - qp.b;
    r.primal = std::max(0.0, slack.maxCoeff());
    grad += qp.a.transpose() * mu;
    r.comp = std::abs(mu.dot(slack));
  }
  r.dual = grad.cwiseAbs().maxCoeff();
  return r;
}

// Equality-constrained KKT solve on a trial active set, with static
// regularization and iterative refinement against the unregularized system.
// Returns false when the linear solve degenerates.
bool solve_active_kkt(const QuadraticProgram& qp, const std::vector<int>& active,
                      Eigen::VectorXd& x, Eigen::VectorXd& mu_active) {
  const int n = qp.num_vars();
  const int k = static_cast<int>(active.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  for (int i = 0; i < n; ++i) kkt(i, i) = 2.0 * qp.quad[i];
  for (int j = 0; j < k; ++j) {
    kkt.block(0, n + j, n, 1) = qp.a.row(active[j]).transpose();
    kkt.block(n + j, 0, 1, n) = qp.a.row(active[j]);
  }
  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = -qp.lin;
  for (int j = 0; j < k; ++j) rhs[n + j] = qp.b[active[j]];

  const double reg = 1e-11 * std::max(1.0, kkt.cwiseAbs().maxCoeff());
  Eigen::MatrixXd kkt_reg = kkt;
  for (int i = 0; i < n; ++i) kkt_reg(i, i) += reg;
  for (int j = 0; j < k; ++j) kkt_reg(n + j, n + j) -= reg;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt_reg);
  Eigen::VectorXd u = lu.solve(rhs);
  for (int refine = 0; refine < 3; ++refine) {
    Eigen::VectorXd resid = rhs - kkt * u;
    u += lu.solve(resid);
  }
  if (!u.allFinite()) return false;

  x = u.head(n);
  mu_active = u.tail(k);
  return true;
}

// Active-set polish: identify rows pinned by the ADMM iterate, resolve the
// KKT equalities exactly, drop rows whose multiplier comes out negative.
bool polish(const QuadraticProgram& qp, const Eigen::VectorXd& x_admm,
            const Eigen::VectorXd& y_admm, double feas_tol, double opt_tol,
            QpSolution& out) {
  const int n = qp.num_vars();
  const int m = qp.num_rows();

  Eigen::VectorXd slack = qp.b - qp.a * x_admm;
  const double y_scale = std::max(1e-12, y_admm.cwiseAbs().maxCoeff());
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    const double slack_tol = 1e-6 * (1.0 + std::abs(qp.b[i]));
    if (y_admm[i] > 1e-9 * y_scale || slack[i] < slack_tol) active.push_back(i);
  }
  if (static_cast<int>(active.size()) > n + 8) {
    // Keep the most plausible rows; a wildly overfull set means the ADMM
    // iterate is not yet settled.
    std::sort(active.begin(), active.end(), [&](int a, int b) {
      return y_admm[a] > y_admm[b];
    });
    active.resize(n + 8);
    std::sort(active.begin(), active.end());
  }

  Eigen::VectorXd x, mu_active;
  for (int round = 0; round < 8; ++round) {
    if (!solve_active_kkt(qp, active, x, mu_active)) return false;
    std::vector<int> keep;
    keep.reserve(active.size());
    bool dropped = false;
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (mu_active[static_cast<int>(j)] < -1e-10) {
        dropped = true;
      } else {
        keep.push_back(active[j]);
      }
    }
    if (!dropped) break;
    active = std::move(keep);
    if (round == 7) return false;
  }

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
  for (std::size_t j = 0; j < active.size(); ++j) {
    mu[active[j]] = std::max(0.0, mu_active[static_cast<int>(j)]);
  }

  Residuals r = kkt_residuals(qp, x, mu);
  const double dual_scale = 1.0 + qp.lin.cwiseAbs().maxCoeff();
  if (r.primal <= feas_tol && r.dual <= opt_tol * dual_scale &&
      r.comp <= std::max(1e-6, opt_tol * dual_scale * 10.0)) {
    out.x = x;
    out.dual = mu;
    out.primal_residual = r.primal;
    out.dual_residual = r.dual;
    out.comp_slackness = r.comp;
    out.polished = true;
    return true;
  }
  return false;
}

// Least-infeasible diagnosis: relax every row with its own slack, penalize
// the squared slack, and report rows that still need one.
std::vector<int> diagnose_infeasible_rows(const QuadraticProgram& qp,
                                          double feas_tol) {
  const int n = qp.num_vars();
  const int m = qp.num_rows();
  QuadraticProgram relaxed;
  relaxed.quad.resize(n + m);
  relaxed.quad.head(n).setConstant(1e-8);
  relaxed.quad.tail(m).setConstant(1.0);
  relaxed.lin = Eigen::VectorXd::Zero(n + m);
  relaxed.a = Eigen::MatrixXd::Zero(2 * m, n + m);
  relaxed.a.topLeftCorner(m, n) = qp.a;
  relaxed.a.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  relaxed.a.bottomRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  relaxed.b.resize(2 * m);
  relaxed.b.head(m) = qp.b;
  relaxed.b.tail(m).setZero();

  QpSettings settings;
  settings.diagnose_infeasibility = false;
  settings.opt_tol = 1e-7;
  QpSolution sol = solve(relaxed, settings);
  std::vector<int> rows;
  if (sol.status == QpStatus::kIterationLimit) return rows;
  for (int i = 0; i < m; ++i) {
    const double u = sol.x[n + i];
    if (u > std::max(feas_tol * 10.0, 1e-6 * (1.0 + std::abs(qp.b[i])))) {
      rows.push_back(i);
    }
  }
  return rows;
}

}  // namespace

QpSolution solve(const QuadraticProgram& qp, const QpSettings& settings) {
  validate(qp);
  const int n = qp.num_vars();
  const int m = qp.num_rows();

  QpSolution sol;
  sol.dual = Eigen::VectorXd::Zero(m);

  const double b_inf = m > 0 ? qp.b.cwiseAbs().maxCoeff() : 0.0;
  const double feas_tol =
      settings.feas_tol < 0.0 ? 1e-8 * (1.0 + b_inf) : settings.feas_tol;
  const double opt_tol = settings.opt_tol;
  const double dual_scale = 1.0 + qp.lin.cwiseAbs().maxCoeff();

  if (m == 0) {
    // Unconstrained separable case.
    sol.x.resize(n);
    for (int i = 0; i < n; ++i) {
      if (qp.quad[i] > 0.0) {
        sol.x[i] = -qp.lin[i] / (2.0 * qp.quad[i]);
      } else if (qp.lin[i] == 0.0) {
        sol.x[i] = 0.0;
      } else {
        sol.status = QpStatus::kIterationLimit;  // unbounded direction
        sol.x.setZero();
        return sol;
      }
    }
    sol.status = QpStatus::kOptimal;
    sol.objective = objective_value(qp, sol.x);
    sol.polished = true;
    return sol;
  }

  Eigen::MatrixXd at = qp.a.transpose();
  double rho = 0.1;
  auto factor_for = [&](double rho_value) {
    Eigen::MatrixXd mfac = rho_value * (at * qp.a);
    mfac.diagonal() += 2.0 * qp.quad + Eigen::VectorXd::Constant(n, kSigma);
    return Eigen::LLT<Eigen::MatrixXd>(mfac);
  };
  Eigen::LLT<Eigen::MatrixXd> llt = factor_for(rho);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("qp: splitting system factorization failed");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = (qp.a * x).cwiseMin(qp.b);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y_prev = y;

  int iter = 0;
  for (; iter < settings.max_iter; ++iter) {
    y_prev = y;
    Eigen::VectorXd rhs = kSigma * x - qp.lin + at * (rho * z - y);
    Eigen::VectorXd x_tilde = llt.solve(rhs);
    Eigen::VectorXd z_tilde = qp.a * x_tilde;

    Eigen::VectorXd x_next = kRelax * x_tilde + (1.0 - kRelax) * x;
    Eigen::VectorXd z_mix = kRelax * z_tilde + (1.0 - kRelax) * z;
    Eigen::VectorXd z_next = (z_mix + y / rho).cwiseMin(qp.b);
    y = y + rho * (z_mix - z_next);
    x = x_next;
    z = z_next;

    if ((iter + 1) % kCheckEvery != 0) continue;

    Eigen::VectorXd ax = qp.a * x;
    const double split_gap = (ax - z).cwiseAbs().maxCoeff();
    Eigen::VectorXd grad = 2.0 * qp.quad.cwiseProduct(x) + qp.lin + at * y;
    const double r_dual = grad.cwiseAbs().maxCoeff();

    const double gap_tol = std::max(feas_tol, 1e-9 * (1.0 + b_inf));
    const double dual_tol = std::max(opt_tol * dual_scale, 1e-9 * dual_scale);
    if (split_gap <= gap_tol * 100.0 && r_dual <= dual_tol * 100.0) {
      if (polish(qp, x, y, feas_tol, opt_tol, sol)) {
        sol.status = QpStatus::kOptimal;
        sol.objective = objective_value(qp, sol.x);
        sol.iterations = iter + 1;
        return sol;
      }
      // Polishing failed; accept the raw iterate only at full tolerance.
      Eigen::VectorXd mu = y.cwiseMax(0.0);
      Residuals r = kkt_residuals(qp, x, mu);
      if (r.primal <= feas_tol && r.dual <= dual_tol &&
          r.comp <= std::max(1e-6, 10.0 * dual_tol)) {
        sol.status = QpStatus::kOptimal;
        sol.x = x;
        sol.dual = mu;
        sol.objective = objective_value(qp, x);
        sol.primal_residual = r.primal;
        sol.dual_residual = r.dual;
        sol.comp_slackness = r.comp;
        sol.iterations = iter + 1;
        return sol;
      }
    }

    // Primal infeasibility certificate from the dual update direction. Only
    // meaningful while the splitting gap is clearly unresolved.
    Eigen::VectorXd dy = y - y_prev;
    const double dy_inf = dy.cwiseAbs().maxCoeff();
    if (dy_inf > 1e-12 && split_gap > 10.0 * gap_tol) {
      const double neg_part = std::max(0.0, -dy.minCoeff());
      const double atdy = (at * dy).cwiseAbs().maxCoeff();
      const double bty = qp.b.dot(dy);
      if (neg_part <= 1e-8 * dy_inf && atdy <= 1e-8 * dy_inf * (1.0 + b_inf) &&
          bty < -1e-10 * dy_inf * (1.0 + b_inf)) {
        sol.status = QpStatus::kInfeasible;
        sol.x = x;
        sol.iterations = iter + 1;
        if (settings.diagnose_infeasibility) {
          sol.violated_rows = diagnose_infeasible_rows(qp, feas_tol);
        }
        return sol;
      }
    }

    if ((iter + 1) % kRhoAdaptEvery == 0) {
      const double prim_rel = split_gap / (1.0 + b_inf);
      const double dual_rel = r_dual / dual_scale;
      if (prim_rel > 1e-16 && dual_rel > 1e-16) {
        const double ratio = std::sqrt(prim_rel / dual_rel);
        if (ratio > 5.0 || ratio < 0.2) {
          rho = std::clamp(rho * ratio, kRhoMin, kRhoMax);
          llt = factor_for(rho);
        }
      }
    }
  }

  // Iteration cap: report the best information available.
  Eigen::VectorXd mu = y.cwiseMax(0.0);
  Residuals r = kkt_residuals(qp, x, mu);
  sol.status = QpStatus::kIterationLimit;
  sol.x = x;
  sol.dual = mu;
  sol.objective = objective_value(qp, x);
  sol.primal_residual = r.primal;
  sol.dual_residual = r.dual;
  sol.comp_slackness = r.comp;
  sol.iterations = iter;
  return sol;
}

}  // namespace jcc
