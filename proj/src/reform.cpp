#include "jcc/reform.hpp"

#include <cmath>
#include <stdexcept>

#include "jcc/errors.hpp"

namespace jcc {

RiskBudget uniform_budget(const std::vector<ConstraintView>& views, int horizon,
                          double per_view_risk, double epsilon) {
  RiskBudget budget;
  budget.epsilon = epsilon;
  budget.line_risks.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    budget.line_risks[t].reserve(views.size());
    for (const auto& view : views) {
      budget.line_risks[t].push_back({view.index, per_view_risk});
    }
  }
  return budget;
}

namespace {

void check_risk(double risk) {
  if (!(risk > 0.0 && risk <= kMaxViewRisk)) {
    throw std::domain_error("risk level must lie in (0, 0.5]");
  }
}

}  // namespace

TightenedConstraint tighten_line_scc(const ConstraintView& view, int t,
                                     double risk, const SensitivityMatrix& sens,
                                     const Eigen::MatrixXd& sigma,
                                     const Eigen::VectorXd& wind_forecast,
                                     const Eigen::VectorXd& demand) {
  check_risk(risk);
  const Eigen::VectorXd wind_row = sens.wind.row(view.line_row).transpose();
  const double variance = wind_row.dot(sigma * wind_row);
  const double stddev = variance > 0.0 ? std::sqrt(variance) : 0.0;
  // No recourse: dispatch does not react to the error, so the margin is a
  // constant offset and the row stays linear in g_t.
  const double margin =
      stddev > 0.0 ? std_normal_quantile(1.0 - risk) * stddev : 0.0;

  TightenedConstraint out;
  out.view_index = view.index;
  out.t = t;
  out.margin_mw = margin;
  out.row = view.sign * sens.gen.row(view.line_row).transpose();
  const double nominal_rest =
      view.sign * (wind_row.dot(wind_forecast) +
                   sens.load.row(view.line_row).dot(demand));
  out.rhs = view.bound_mw - nominal_rest - margin;
  return out;
}

BalanceConstraint tighten_balance_scc(int t, double epsilon,
                                      const Eigen::MatrixXd& sigma,
                                      const Eigen::VectorXd& wind_forecast,
                                      const Eigen::VectorXd& demand, int n_gen) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::domain_error("balance risk must lie in (0, 0.5)");
  }
  (void)t;
  const double variance = sigma.sum();
  const double stddev = variance > 0.0 ? std::sqrt(variance) : 0.0;
  const double margin =
      stddev > 0.0 ? std_normal_quantile(1.0 - epsilon) * stddev : 0.0;

  BalanceConstraint out;
  out.margin_mw = margin;
  // 1^T g >= 1^T d - 1^T wbar + margin, flipped into a <= row.
  out.row = Eigen::VectorXd::Constant(n_gen, -1.0);
  out.rhs = wind_forecast.sum() - demand.sum() - margin;
  return out;
}

QuadraticProgram assemble_opf(const Case& study, const SensitivityMatrix& sens,
                              const std::vector<ConstraintView>& views,
                              const RiskBudget& budget) {
  const Network& net = study.network;
  const int horizon = net.horizon;
  if (horizon < 1) throw ValidationError("assemble_opf: empty horizon");
  if (static_cast<int>(budget.line_risks.size()) != horizon) {
    throw ValidationError("assemble_opf: budget horizon mismatch");
  }
  const int ng = static_cast<int>(net.generators.size());
  const int nvar = ng * horizon;

  int n_line_rows = 0;
  for (const auto& step : budget.line_risks)
    n_line_rows += static_cast<int>(step.size());
  const int n_rows =
      2 * ng * horizon + 2 * ng * (horizon - 1) + horizon + n_line_rows;

  QuadraticProgram qp;
  qp.quad.resize(nvar);
  qp.lin.resize(nvar);
  qp.constant = 0.0;
  qp.a = Eigen::MatrixXd::Zero(n_rows, nvar);
  qp.b.resize(n_rows);
  qp.row_labels.reserve(n_rows);

  for (int t = 0; t < horizon; ++t) {
    for (int k = 0; k < ng; ++k) {
      const auto& gen = net.generators[k];
      qp.quad[t * ng + k] = gen.cost_quad;
      qp.lin[t * ng + k] = gen.cost_lin;
      if (t == 0) qp.constant += horizon * gen.cost_const;
    }
  }

  int row = 0;
  auto var = [ng](int t, int k) { return t * ng + k; };

  for (int t = 0; t < horizon; ++t) {
    for (int k = 0; k < ng; ++k) {
      const auto& gen = net.generators[k];
      qp.a(row, var(t, k)) = 1.0;
      qp.b[row] = gen.g_max_mw;
      qp.row_labels.push_back("cap_up[t=" + std::to_string(t) +
                              ",g=" + std::to_string(gen.id) + "]");
      ++row;
      qp.a(row, var(t, k)) = -1.0;
      qp.b[row] = -gen.g_min_mw;
      qp.row_labels.push_back("cap_lo[t=" + std::to_string(t) +
                              ",g=" + std::to_string(gen.id) + "]");
      ++row;
    }
  }

  for (int t = 0; t + 1 < horizon; ++t) {
    for (int k = 0; k < ng; ++k) {
      const auto& gen = net.generators[k];
      qp.a(row, var(t + 1, k)) = 1.0;
      qp.a(row, var(t, k)) = -1.0;
      qp.b[row] = gen.ramp_up_mw;
      qp.row_labels.push_back("ramp_up[t=" + std::to_string(t) +
                              ",g=" + std::to_string(gen.id) + "]");
      ++row;
      qp.a(row, var(t + 1, k)) = -1.0;
      qp.a(row, var(t, k)) = 1.0;
      qp.b[row] = -gen.ramp_down_mw;
      qp.row_labels.push_back("ramp_dn[t=" + std::to_string(t) +
                              ",g=" + std::to_string(gen.id) + "]");
      ++row;
    }
  }

  for (int t = 0; t < horizon; ++t) {
    const Eigen::VectorXd wbar = wind_forecast_at(net, t);
    const Eigen::VectorXd d = demand_at(net, t);
    BalanceConstraint bal = tighten_balance_scc(
        t, budget.epsilon, study.uncertainty.sigma_at(t), wbar, d, ng);
    qp.a.block(row, t * ng, 1, ng) = bal.row.transpose();
    qp.b[row] = bal.rhs;
    qp.row_labels.push_back("balance[t=" + std::to_string(t) + "]");
    ++row;
  }

  for (int t = 0; t < horizon; ++t) {
    const Eigen::VectorXd wbar = wind_forecast_at(net, t);
    const Eigen::VectorXd d = demand_at(net, t);
    const Eigen::MatrixXd& sigma = study.uncertainty.sigma_at(t);
    for (const auto& entry : budget.line_risks[t]) {
      const ConstraintView& view = views.at(entry.view_index - 1);
      TightenedConstraint tc =
          tighten_line_scc(view, t, entry.risk, sens, sigma, wbar, d);
      qp.a.block(row, t * ng, 1, ng) = tc.row.transpose();
      qp.b[row] = tc.rhs;
      qp.row_labels.push_back("line[t=" + std::to_string(t) +
                              ",n=" + std::to_string(view.index) + "]");
      ++row;
    }
  }

  return qp;
}

}  // namespace jcc
