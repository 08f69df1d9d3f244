#include "jcc/evaluation.hpp"

#include <cmath>

#include "jcc/errors.hpp"
#include "jcc/parallel.hpp"

namespace jcc {

EvalDetail evaluate_pos_with(const std::vector<Eigen::VectorXd>& dispatch,
                             const Case& study, const SensitivityMatrix& sens,
                             const std::vector<ConstraintView>& views,
                             const ScenarioSet& eval_scenarios, double alpha,
                             const std::string& method_name) {
  const Network& net = study.network;
  const int horizon = net.horizon;
  if (static_cast<int>(dispatch.size()) != horizon ||
      eval_scenarios.horizon() != horizon) {
    throw ValidationError("evaluate_pos: horizon mismatch");
  }
  const int n_eval = eval_scenarios.sample_count;

  EvalDetail detail;
  detail.pos.method = method_name;
  detail.pos.n_eval = n_eval;
  detail.pos.entries.resize(horizon);

  std::vector<std::vector<long>> counts(
      horizon, std::vector<long>(views.size(), 0));
  std::vector<long> successes(horizon, 0);

  parallel_for(horizon, [&](int t) {
    const Eigen::VectorXd d = demand_at(net, t);
    const Eigen::VectorXd base = sens.gen * dispatch[t] + sens.load * d;
    const Eigen::MatrixXd sampled =
        eval_scenarios.draws[t] * sens.wind.transpose();
    long ok = 0;
    for (int s = 0; s < n_eval; ++s) {
      bool all_inside = true;
      for (std::size_t j = 0; j < views.size(); ++j) {
        const auto& view = views[j];
        const double flow = base[view.line_row] + sampled(s, view.line_row);
        if (view.sign * flow > view.bound_mw) {
          all_inside = false;
          ++counts[t][j];
        }
      }
      if (all_inside) ++ok;
    }
    successes[t] = ok;
  });

  for (int t = 0; t < horizon; ++t) {
    PosEntry& entry = detail.pos.entries[t];
    entry.t = t;
    entry.pos = static_cast<double>(successes[t]) / n_eval;
    entry.half_width =
        3.0 * std::sqrt(entry.pos * (1.0 - entry.pos) / n_eval);
    entry.pass = entry.pos >= 1.0 - alpha - entry.half_width;
    for (std::size_t j = 0; j < views.size(); ++j) {
      if (counts[t][j] > 0) {
        detail.attribution.push_back({t, views[j].index, views[j].line_id,
                                      views[j].sign > 0 ? 1 : -1,
                                      counts[t][j]});
      }
    }
  }
  return detail;
}

EvalDetail evaluate_pos(const std::vector<Eigen::VectorXd>& dispatch,
                        const Case& study, int n_eval, std::uint64_t eval_seed,
                        double alpha, std::uint64_t solve_seed) {
  if (eval_seed == solve_seed) {
    throw ValidationError(
        "evaluation seed equals the solve seed; evaluation scenarios must be "
        "independent of the scenarios used for solving");
  }
  const Network& net = study.network;
  const SensitivityMatrix sens = build_ptdf(net);
  const auto views = constraint_views(net);
  std::vector<Eigen::VectorXd> forecasts(net.horizon);
  for (int t = 0; t < net.horizon; ++t) forecasts[t] = wind_forecast_at(net, t);
  const ScenarioSet eval_scenarios =
      draw_scenarios(study.uncertainty, forecasts, n_eval, eval_seed);
  return evaluate_pos_with(dispatch, study, sens, views, eval_scenarios, alpha,
                           "dispatch");
}

CompareResult compare_methods(const Case& study, const FrameworkConfig& config,
                              const std::vector<MethodId>& methods, int n_eval,
                              std::uint64_t eval_seed) {
  if (eval_seed == config.seed) {
    throw ValidationError(
        "evaluation seed equals the solve seed; choose a different stream");
  }
  const Network& net = study.network;
  ensure_valid(net);
  const SensitivityMatrix sens = build_ptdf(net);
  const auto views = constraint_views(net);
  std::vector<Eigen::VectorXd> forecasts(net.horizon);
  for (int t = 0; t < net.horizon; ++t) forecasts[t] = wind_forecast_at(net, t);
  const ScenarioSet eval_scenarios =
      draw_scenarios(study.uncertainty, forecasts, n_eval, eval_seed);

  CompareResult result;

  // Reference objective for the cost gaps, run regardless of the list.
  double base_objective = 0.0;
  bool have_base = false;
  try {
    base_objective = solve_no_jcc(study, config).objective;
    have_base = true;
  } catch (const std::exception&) {
    have_base = false;
  }

  for (MethodId id : methods) {
    CostRow row;
    row.method = to_string(id);
    try {
      DispatchSchedule schedule = run_method(id, study, config);
      row.ok = true;
      row.objective = schedule.objective;
      row.gap = have_base && base_objective != 0.0
                    ? (schedule.objective - base_objective) /
                          std::abs(base_objective)
                    : 0.0;
      EvalDetail detail = evaluate_pos_with(
          schedule.dispatch, study, sens, views, eval_scenarios, config.alpha,
          row.method);
      result.pos.push_back(detail.pos);
      result.attribution.emplace_back(row.method, std::move(detail.attribution));
      result.schedules.emplace(row.method, std::move(schedule));
    } catch (const std::exception& err) {
      row.ok = false;
      row.error = err.what();
      result.all_ok = false;
    }
    result.cost.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace jcc
