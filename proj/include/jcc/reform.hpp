#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jcc/case.hpp"
#include "jcc/grid.hpp"
#include "jcc/normal.hpp"
#include "jcc/qp.hpp"

namespace jcc {

// Risks above one half would need negative margins; allocations beyond this
// are clamped and a warning recorded by the caller.
inline constexpr double kMaxViewRisk = 0.5;

struct ViewRisk {
  int view_index = 0;  // n
  double risk = 0.0;   // in (0, kMaxViewRisk]
};

// Active single-constraint set and its risk levels, per time step, plus the
// supply-demand risk. The views listed here are exactly the rows added to
// the assembled program.
struct RiskBudget {
  double epsilon = 1e-4;
  std::vector<std::vector<ViewRisk>> line_risks;  // size horizon
};

// All views active at one shared risk level, for every time step.
RiskBudget uniform_budget(const std::vector<ConstraintView>& views, int horizon,
                          double per_view_risk, double epsilon);

// Deterministic surrogate of one probabilistic line constraint: the nominal
// flow plus a Gaussian margin on the wind component.
struct TightenedConstraint {
  int view_index = 0;
  int t = 0;
  double margin_mw = 0.0;
  Eigen::VectorXd row;  // coefficients over g_t
  double rhs = 0.0;
};

TightenedConstraint tighten_line_scc(const ConstraintView& view, int t,
                                     double risk, const SensitivityMatrix& sens,
                                     const Eigen::MatrixXd& sigma,
                                     const Eigen::VectorXd& wind_forecast,
                                     const Eigen::VectorXd& demand);

// Supply-demand adequacy as one lower bound on total generation. One-sided:
// over-generation is not constrained.
struct BalanceConstraint {
  double margin_mw = 0.0;
  Eigen::VectorXd row;  // over g_t (all -1, as a <= row)
  double rhs = 0.0;
};

BalanceConstraint tighten_balance_scc(int t, double epsilon,
                                      const Eigen::MatrixXd& sigma,
                                      const Eigen::VectorXd& wind_forecast,
                                      const Eigen::VectorXd& demand, int n_gen);

// Full multi-period program over stacked dispatch variables x[t*N_g + k].
// Row layout: capacity bounds (per t, per generator: upper then lower), ramp
// limits (per transition, per generator: up then down), one balance row per
// t, then the tightened line rows per (t, active view) in budget order.
QuadraticProgram assemble_opf(const Case& study, const SensitivityMatrix& sens,
                              const std::vector<ConstraintView>& views,
                              const RiskBudget& budget);

}  // namespace jcc
