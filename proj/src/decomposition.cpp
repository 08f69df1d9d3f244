#include "jcc/decomposition.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "jcc/errors.hpp"
#include "jcc/parallel.hpp"

namespace jcc {

namespace {

int popcount_row(const std::vector<std::uint64_t>& words) {
  int total = 0;
  for (std::uint64_t w : words) total += std::popcount(w);
  return total;
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

}  // namespace

int ViolationMatrix::count(int t, int view_index) const {
  return popcount_row(row(t, view_index));
}

ViolationMatrix build_violation_matrix(
    const std::vector<Eigen::VectorXd>& dispatch, const ScenarioSet& scenarios,
    const SensitivityMatrix& sens, const Case& study,
    const std::vector<ConstraintView>& views) {
  const Network& net = study.network;
  const int horizon = net.horizon;
  if (static_cast<int>(dispatch.size()) != horizon ||
      scenarios.horizon() != horizon) {
    throw ValidationError("violation matrix: horizon mismatch");
  }

  ViolationMatrix vm;
  vm.horizon = horizon;
  vm.n_views = static_cast<int>(views.size());
  vm.n_samples = scenarios.sample_count;
  vm.rows.assign(static_cast<std::size_t>(horizon) * vm.n_views,
                 std::vector<std::uint64_t>(vm.words(), 0));

  parallel_for(horizon, [&](int t) {
    const Eigen::VectorXd d = demand_at(net, t);
    // Fixed part of every flow, then one linear map per sample block.
    const Eigen::VectorXd base = sens.gen * dispatch[t] + sens.load * d;
    const Eigen::MatrixXd sampled =
        scenarios.draws[t] * sens.wind.transpose();  // N_s x |L|
    for (const auto& view : views) {
      auto& bits = vm.rows[static_cast<std::size_t>(t) * vm.n_views +
                           (view.index - 1)];
      for (int s = 0; s < vm.n_samples; ++s) {
        const double flow = base[view.line_row] + sampled(s, view.line_row);
        if (view.sign * flow > view.bound_mw) {
          bits[s >> 6] |= (std::uint64_t{1} << (s & 63));
        }
      }
    }
  });
  return vm;
}

Classification classify(const ViolationMatrix& vm) {
  Classification cls;
  cls.n_samples = vm.n_samples;
  cls.counts.resize(vm.horizon);
  cls.marginal.resize(vm.horizon);
  cls.possible.resize(vm.horizon);
  for (int t = 0; t < vm.horizon; ++t) {
    cls.counts[t].resize(vm.n_views);
    cls.marginal[t].resize(vm.n_views);
    for (int n = 1; n <= vm.n_views; ++n) {
      const int c = vm.count(t, n);
      cls.counts[t][n - 1] = c;
      cls.marginal[t][n - 1] = static_cast<double>(c) / vm.n_samples;
      if (c > 0) cls.possible[t].push_back(n);
    }
  }
  return cls;
}

int joint_violation_count(const ViolationMatrix& vm, int t,
                          const std::vector<int>& subset) {
  if (subset.empty()) {
    throw std::domain_error("joint violation of an empty view set");
  }
  std::vector<std::uint64_t> acc = vm.row(t, subset.front());
  for (std::size_t j = 1; j < subset.size(); ++j) {
    const auto& other = vm.row(t, subset[j]);
    for (std::size_t w = 0; w < acc.size(); ++w) acc[w] &= other[w];
  }
  return popcount_row(acc);
}

double estimate_joint_subset(const ViolationMatrix& vm, int t,
                             const std::vector<int>& subset) {
  return static_cast<double>(joint_violation_count(vm, t, subset)) /
         vm.n_samples;
}

EstimationResult estimate_union_overlap(
    const ViolationMatrix& vm, const std::vector<std::vector<int>>& possible) {
  EstimationResult est;
  est.union_counts.assign(vm.horizon, 0);
  est.union_prob.assign(vm.horizon, 0.0);
  est.correction_counts.assign(vm.horizon, 0);
  est.correction.assign(vm.horizon, 0.0);

  for (int t = 0; t < vm.horizon; ++t) {
    const auto& set = possible.at(t);
    if (set.empty()) continue;
    std::vector<std::uint64_t> acc(vm.words(), 0);
    int marginal_sum = 0;
    for (int n : set) {
      const auto& bits = vm.row(t, n);
      for (std::size_t w = 0; w < acc.size(); ++w) acc[w] |= bits[w];
      marginal_sum += vm.count(t, n);
    }
    const int union_count = popcount_row(acc);
    est.union_counts[t] = union_count;
    est.union_prob[t] = static_cast<double>(union_count) / vm.n_samples;
    est.correction_counts[t] = marginal_sum - union_count;
    est.correction[t] =
        static_cast<double>(est.correction_counts[t]) / vm.n_samples;
  }
  return est;
}

RiskAllocation allocate_risk(const Classification& cls) {
  RiskAllocation alloc;
  alloc.beta.resize(cls.possible.size());
  for (std::size_t t = 0; t < cls.possible.size(); ++t) {
    const auto& set = cls.possible[t];
    if (set.empty()) continue;
    long total = 0;
    for (int n : set) total += cls.counts[t][n - 1];
    auto& beta = alloc.beta[t];
    beta.resize(set.size());
    double assigned = 0.0;
    for (std::size_t j = 0; j + 1 < set.size(); ++j) {
      beta[j] = static_cast<double>(cls.counts[t][set[j] - 1]) /
                static_cast<double>(total);
      assigned += beta[j];
    }
    beta[set.size() - 1] = 1.0 - assigned;  // absorbs rounding
  }
  return alloc;
}

namespace {

struct SolveArtifacts {
  QuadraticProgram qp;
  QpSolution solution;
};

std::vector<Eigen::VectorXd> unstack(const Eigen::VectorXd& x, int horizon,
                                     int ng) {
  std::vector<Eigen::VectorXd> out(horizon);
  for (int t = 0; t < horizon; ++t) out[t] = x.segment(t * ng, ng);
  return out;
}

std::string infeasible_summary(const QuadraticProgram& qp,
                               const QpSolution& sol) {
  std::string msg = "infeasible";
  if (!sol.violated_rows.empty()) {
    msg += " (irreducibly violated:";
    int shown = 0;
    for (int r : sol.violated_rows) {
      if (shown++ == 6) {
        msg += " ...";
        break;
      }
      msg += " " + qp.label(r);
    }
    msg += ")";
  }
  return msg;
}

// Flags time steps where some tightened line row binds at the solution.
void mark_active_lines(const QuadraticProgram& qp, const QpSolution& sol,
                       int first_line_row, const std::vector<int>& row_step,
                       std::vector<StepDiagnostics>& steps) {
  if (sol.status != QpStatus::kOptimal) return;
  const Eigen::VectorXd slack = qp.b - qp.a * sol.x;
  for (int r = first_line_row; r < qp.num_rows(); ++r) {
    const double tol = 1e-6 * (1.0 + std::abs(qp.b[r]));
    if (slack[r] <= tol) steps[row_step[r - first_line_row]].line_active = true;
  }
}

}  // namespace

DispatchSchedule presolve(const Case& study, const FrameworkConfig& config) {
  return run_framework(study, config, AllocationMode::kUniform, 0);
}

DispatchSchedule iterate(const Case& study, const FrameworkConfig& config) {
  return run_framework(study, config, AllocationMode::kAdaptive,
                       config.max_iterations);
}

DispatchSchedule run_framework(const Case& study, const FrameworkConfig& config,
                               AllocationMode mode, int max_passes) {
  const Network& net = study.network;
  ensure_valid(net);
  if (!(config.alpha > 0.0 && config.alpha < 0.5)) {
    throw ValidationError("alpha must lie in (0, 0.5)");
  }
  if (!(config.tolerance > 0.0)) {
    throw ValidationError("tolerance must be > 0");
  }

  const SensitivityMatrix sens = build_ptdf(net);
  const auto views = constraint_views(net);
  const int n_views = static_cast<int>(views.size());
  const int horizon = net.horizon;
  const int ng = static_cast<int>(net.generators.size());

  std::vector<Eigen::VectorXd> forecasts(horizon);
  for (int t = 0; t < horizon; ++t) forecasts[t] = wind_forecast_at(net, t);

  // Step 1 runs once; the same samples serve every later pass.
  const ScenarioSet scenarios =
      draw_scenarios(study.uncertainty, forecasts, config.n_samples, config.seed);

  DispatchSchedule out;
  out.steps.resize(horizon);

  // Conservative warm-up: all views at alpha/|N|.
  const double t0 = now_ms();
  const RiskBudget boole_budget = uniform_budget(
      views, horizon, config.alpha / n_views, config.epsilon);
  QuadraticProgram qp = assemble_opf(study, sens, views, boole_budget);
  QpSolution sol = solve(qp);
  if (sol.status == QpStatus::kInfeasible) {
    throw FrameworkError("presolve " + infeasible_summary(qp, sol));
  }
  if (sol.status == QpStatus::kIterationLimit) {
    throw FrameworkError("presolve did not converge in the QP solver");
  }

  out.dispatch = unstack(sol.x, horizon, ng);
  out.objective = sol.objective;
  out.trace.push_back(
      {0, sol.objective, n_views * horizon, 0.0, now_ms() - t0});
  out.status = "presolved";

  QuadraticProgram last_qp = std::move(qp);
  QpSolution last_sol = std::move(sol);
  const int fixed_rows = 2 * ng * horizon + 2 * ng * (horizon - 1) + horizon;
  int last_first_line_row = fixed_rows;
  std::vector<int> last_row_step;
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < n_views; ++j) last_row_step.push_back(t);
  }

  double f_prev = out.objective;
  for (int pass = 1; pass <= max_passes; ++pass) {
    const double t_pass = now_ms();
    const ViolationMatrix vm =
        build_violation_matrix(out.dispatch, scenarios, sens, study, views);
    const Classification cls = classify(vm);
    const EstimationResult est = estimate_union_overlap(vm, cls.possible);

    RiskAllocation alloc;
    if (mode == AllocationMode::kAdaptive) {
      alloc = allocate_risk(cls);
    } else {
      alloc.beta.resize(horizon);
      for (int t = 0; t < horizon; ++t) {
        const std::size_t k = cls.possible[t].size();
        alloc.beta[t].assign(k, k ? 1.0 / static_cast<double>(k) : 0.0);
      }
    }

    RiskBudget budget;
    budget.epsilon = config.epsilon;
    budget.line_risks.resize(horizon);
    int sum_possible = 0;
    double sum_correction = 0.0;
    for (int t = 0; t < horizon; ++t) {
      sum_possible += static_cast<int>(cls.possible[t].size());
      sum_correction += est.correction[t];
      for (std::size_t j = 0; j < cls.possible[t].size(); ++j) {
        double risk =
            alloc.beta[t][j] * (config.alpha + est.correction[t]);
        if (risk > kMaxViewRisk) {
          out.warnings.push_back(
              "risk for view " + std::to_string(cls.possible[t][j]) + " at t=" +
              std::to_string(t) + " clamped to 0.5");
          risk = kMaxViewRisk;
        }
        budget.line_risks[t].push_back({cls.possible[t][j], risk});
      }
    }

    QuadraticProgram pass_qp = assemble_opf(study, sens, views, budget);
    QpSolution pass_sol = solve(pass_qp);
    if (pass_sol.status == QpStatus::kInfeasible) {
      out.warnings.push_back("re-solve at pass " + std::to_string(pass) + " " +
                             infeasible_summary(pass_qp, pass_sol) +
                             "; keeping previous dispatch");
      out.status = "fallback-infeasible-resolve";
      out.converged = false;
      break;
    }
    if (pass_sol.status == QpStatus::kIterationLimit) {
      out.warnings.push_back("re-solve at pass " + std::to_string(pass) +
                             " hit the QP iteration cap; keeping previous dispatch");
      out.status = "fallback-qp-iteration-limit";
      out.converged = false;
      break;
    }

    out.dispatch = unstack(pass_sol.x, horizon, ng);
    out.objective = pass_sol.objective;
    out.iterations = pass;
    out.trace.push_back({pass, pass_sol.objective, sum_possible,
                         sum_correction, now_ms() - t_pass});

    last_qp = std::move(pass_qp);
    last_sol = std::move(pass_sol);
    last_first_line_row = fixed_rows;
    last_row_step.clear();
    for (int t = 0; t < horizon; ++t) {
      for (std::size_t j = 0; j < budget.line_risks[t].size(); ++j) {
        last_row_step.push_back(t);
      }
    }

    const double rel =
        std::abs(out.objective - f_prev) / std::max(std::abs(f_prev), 1.0);
    if (rel < config.tolerance) {
      out.converged = true;
      out.status = "converged";
      break;
    }
    f_prev = out.objective;
    if (pass == max_passes) {
      out.status = max_passes == 1 ? "single-pass" : "iteration-limit";
    }
  }

  // Final per-step diagnostics against the dispatch being returned.
  {
    const ViolationMatrix vm =
        build_violation_matrix(out.dispatch, scenarios, sens, study, views);
    const Classification cls = classify(vm);
    const EstimationResult est = estimate_union_overlap(vm, cls.possible);
    for (int t = 0; t < horizon; ++t) {
      out.steps[t].possible_count = static_cast<int>(cls.possible[t].size());
      out.steps[t].correction = est.correction[t];
      out.steps[t].union_prob = est.union_prob[t];
    }
    mark_active_lines(last_qp, last_sol, last_first_line_row, last_row_step,
                      out.steps);
  }

  return out;
}

}  // namespace jcc
