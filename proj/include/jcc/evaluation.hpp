#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcc/baselines.hpp"
#include "jcc/case.hpp"
#include "jcc/decomposition.hpp"

namespace jcc {

struct PosEntry {
  int t = 0;
  double pos = 0.0;         // fraction of scenarios with every flow in limits
  double half_width = 0.0;  // 3 * sqrt(pos*(1-pos)/n_eval)
  bool pass = false;        // pos >= 1 - alpha - half_width
};

struct PosReport {
  std::string method;
  int n_eval = 0;
  std::vector<PosEntry> entries;
};

// Which line/direction caused failures, per time step.
struct ViolationCell {
  int t = 0;
  int view_index = 0;
  int line_id = 0;
  int direction = 0;  // +1 upper limit, -1 lower limit
  long count = 0;
};

struct EvalDetail {
  PosReport pos;
  std::vector<ViolationCell> attribution;  // nonzero counts only
};

// Monte Carlo check of the joint constraint on fresh scenarios. The
// evaluation stream must differ from the solve stream: eval_seed == solve
// seed is rejected.
EvalDetail evaluate_pos(const std::vector<Eigen::VectorXd>& dispatch,
                        const Case& study, int n_eval, std::uint64_t eval_seed,
                        double alpha, std::uint64_t solve_seed);

// Same, against a caller-supplied scenario set (shared across methods).
EvalDetail evaluate_pos_with(const std::vector<Eigen::VectorXd>& dispatch,
                             const Case& study, const SensitivityMatrix& sens,
                             const std::vector<ConstraintView>& views,
                             const ScenarioSet& eval_scenarios, double alpha,
                             const std::string& method_name);

struct CostRow {
  std::string method;
  bool ok = false;
  double objective = 0.0;
  double gap = 0.0;  // relative to the no-line-view baseline
  std::string error;
};

struct CostReport {
  std::vector<CostRow> rows;
};

struct CompareResult {
  CostReport cost;
  std::vector<PosReport> pos;
  std::vector<std::pair<std::string, std::vector<ViolationCell>>> attribution;
  std::map<std::string, DispatchSchedule> schedules;
  bool all_ok = true;
};

// Runs every requested method, evaluates each on one shared fresh scenario
// set, and reports costs (gap vs the no-line-view dispatch, computed
// internally when not requested) and per-step PoS. Per-method failures are
// recorded and the comparison continues.
CompareResult compare_methods(const Case& study, const FrameworkConfig& config,
                              const std::vector<MethodId>& methods, int n_eval,
                              std::uint64_t eval_seed);

}  // namespace jcc
