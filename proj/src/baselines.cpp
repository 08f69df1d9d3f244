#include "jcc/baselines.hpp"

#include <chrono>

#include "jcc/errors.hpp"

namespace jcc {

std::string to_string(MethodId id) {
  switch (id) {
    case MethodId::kNoJcc: return "no_jcc";
    case MethodId::kBoole: return "boole";
    case MethodId::kImprovedBoole: return "improved_boole";
    case MethodId::kImprovingBound: return "improving_bound";
    case MethodId::kIterative: return "iterative";
  }
  return "unknown";
}

MethodId method_from_string(const std::string& name) {
  for (MethodId id : all_methods()) {
    if (to_string(id) == name) return id;
  }
  throw ValidationError("unknown method '" + name + "'");
}

std::vector<MethodId> all_methods() {
  return {MethodId::kNoJcc, MethodId::kBoole, MethodId::kImprovedBoole,
          MethodId::kImprovingBound, MethodId::kIterative};
}

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

}  // namespace

DispatchSchedule solve_no_jcc(const Case& study, const FrameworkConfig& config) {
  const Network& net = study.network;
  ensure_valid(net);
  const SensitivityMatrix sens = build_ptdf(net);
  const auto views = constraint_views(net);

  RiskBudget budget;
  budget.epsilon = config.epsilon;
  budget.line_risks.resize(net.horizon);  // no line rows at all

  const double t0 = now_ms();
  QuadraticProgram qp = assemble_opf(study, sens, views, budget);
  QpSolution sol = solve(qp);
  if (sol.status != QpStatus::kOptimal) {
    throw FrameworkError("unconstrained-lines dispatch failed: " +
                         std::string(sol.status == QpStatus::kInfeasible
                                         ? "infeasible"
                                         : "iteration limit"));
  }

  DispatchSchedule out;
  const int ng = static_cast<int>(net.generators.size());
  out.dispatch.resize(net.horizon);
  for (int t = 0; t < net.horizon; ++t)
    out.dispatch[t] = sol.x.segment(t * ng, ng);
  out.objective = sol.objective;
  out.converged = true;
  out.status = "no-line-views";
  out.trace.push_back({0, sol.objective, 0, 0.0, now_ms() - t0});
  out.steps.resize(net.horizon);
  return out;
}

DispatchSchedule solve_boole(const Case& study, const FrameworkConfig& config) {
  return presolve(study, config);
}

double improved_boole_risk(double alpha, double joint_all_views, int n_views) {
  return (alpha + joint_all_views) / n_views;
}

DispatchSchedule solve_improved_boole(const Case& study,
                                      const FrameworkConfig& config) {
  const Network& net = study.network;
  DispatchSchedule pre = presolve(study, config);

  const SensitivityMatrix sens = build_ptdf(net);
  const auto views = constraint_views(net);
  const int n_views = static_cast<int>(views.size());

  std::vector<Eigen::VectorXd> forecasts(net.horizon);
  for (int t = 0; t < net.horizon; ++t) forecasts[t] = wind_forecast_at(net, t);
  const ScenarioSet scenarios = draw_scenarios(
      study.uncertainty, forecasts, config.n_samples, config.seed);
  const ViolationMatrix vm =
      build_violation_matrix(pre.dispatch, scenarios, sens, study, views);

  std::vector<int> full_set(n_views);
  for (int n = 1; n <= n_views; ++n) full_set[n - 1] = n;

  RiskBudget budget;
  budget.epsilon = config.epsilon;
  budget.line_risks.resize(net.horizon);
  for (int t = 0; t < net.horizon; ++t) {
    const double joint = estimate_joint_subset(vm, t, full_set);
    const double risk = improved_boole_risk(config.alpha, joint, n_views);
    for (const auto& view : views) {
      budget.line_risks[t].push_back({view.index, risk});
    }
  }

  const double t0 = now_ms();
  QuadraticProgram qp = assemble_opf(study, sens, views, budget);
  QpSolution sol = solve(qp);
  if (sol.status != QpStatus::kOptimal) {
    throw FrameworkError("improved union-bound re-solve failed");
  }

  DispatchSchedule out;
  const int ng = static_cast<int>(net.generators.size());
  out.dispatch.resize(net.horizon);
  for (int t = 0; t < net.horizon; ++t)
    out.dispatch[t] = sol.x.segment(t * ng, ng);
  out.objective = sol.objective;
  out.converged = true;
  out.status = "single-pass";
  out.trace = pre.trace;
  out.trace.push_back({1, sol.objective, n_views * net.horizon, 0.0,
                       now_ms() - t0});
  out.steps.resize(net.horizon);
  return out;
}

DispatchSchedule solve_improving_bound(const Case& study,
                                       const FrameworkConfig& config) {
  return run_framework(study, config, AllocationMode::kUniform, 1);
}

DispatchSchedule run_method(MethodId id, const Case& study,
                            const FrameworkConfig& config) {
  switch (id) {
    case MethodId::kNoJcc: return solve_no_jcc(study, config);
    case MethodId::kBoole: return solve_boole(study, config);
    case MethodId::kImprovedBoole: return solve_improved_boole(study, config);
    case MethodId::kImprovingBound: return solve_improving_bound(study, config);
    case MethodId::kIterative: return iterate(study, config);
  }
  throw ValidationError("unknown method id");
}

}  // namespace jcc
