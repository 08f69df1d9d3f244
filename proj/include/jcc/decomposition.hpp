#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jcc/case.hpp"
#include "jcc/reform.hpp"
#include "jcc/uncertainty.hpp"

namespace jcc {

// Per (time step, view, sample) violation indicators, bit-packed by sample.
// An indicator is set iff the signed sampled value strictly exceeds the
// bound. Built once per candidate dispatch from the shared scenario set.
struct ViolationMatrix {
  int horizon = 0;
  int n_views = 0;
  int n_samples = 0;
  std::vector<std::vector<std::uint64_t>> rows;  // [t * n_views + (n-1)]

  int words() const { return (n_samples + 63) / 64; }
  const std::vector<std::uint64_t>& row(int t, int view_index) const {
    return rows[static_cast<std::size_t>(t) * n_views + (view_index - 1)];
  }
  int count(int t, int view_index) const;
};

ViolationMatrix build_violation_matrix(
    const std::vector<Eigen::VectorXd>& dispatch, const ScenarioSet& scenarios,
    const SensitivityMatrix& sens, const Case& study,
    const std::vector<ConstraintView>& views);

// Empirical marginals and the possible-event sets N_p(t) = {n : count > 0}.
struct Classification {
  int n_samples = 0;
  std::vector<std::vector<int>> counts;        // [t][n-1]
  std::vector<std::vector<double>> marginal;   // counts / n_samples
  std::vector<std::vector<int>> possible;      // ascending view indices
};

Classification classify(const ViolationMatrix& vm);

// Exact sample count / frequency of all listed views violating together.
int joint_violation_count(const ViolationMatrix& vm, int t,
                          const std::vector<int>& subset);
double estimate_joint_subset(const ViolationMatrix& vm, int t,
                             const std::vector<int>& subset);

// Union probability and the overlap mass E = sum of marginals - union,
// identical (in 1/N_s units) to aggregating every joint term of the
// inclusion-exclusion expansion on the same samples, at linear cost.
struct EstimationResult {
  std::vector<int> union_counts;
  std::vector<double> union_prob;
  std::vector<int> correction_counts;  // E in 1/N_s units
  std::vector<double> correction;      // E
};

EstimationResult estimate_union_overlap(
    const ViolationMatrix& vm, const std::vector<std::vector<int>>& possible);

// Marginal-proportional shares over each possible set; each step sums to 1
// exactly (the last share absorbs rounding).
struct RiskAllocation {
  std::vector<std::vector<double>> beta;  // aligned with Classification::possible
};

RiskAllocation allocate_risk(const Classification& cls);

enum class AllocationMode { kAdaptive, kUniform };

struct FrameworkConfig {
  double alpha = 0.05;
  double epsilon = 1e-4;
  int n_samples = 20000;
  std::uint64_t seed = 42;
  double tolerance = 1e-5;
  int max_iterations = 50;
};

struct IterationRecord {
  int iter = 0;  // 0 = presolve, k >= 1 = k-th re-solve
  double objective = 0.0;
  int sum_possible = 0;      // sum over t of the active-view count solved with
  double sum_correction = 0.0;
  double wall_ms = 0.0;
};

struct StepDiagnostics {
  int possible_count = 0;
  double correction = 0.0;
  double union_prob = 0.0;
  bool line_active = false;  // a tightened line row binds at the solution
};

struct DispatchSchedule {
  std::vector<Eigen::VectorXd> dispatch;  // per t, length N_g
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;  // number of re-solves performed
  std::string status;
  std::vector<IterationRecord> trace;
  std::vector<StepDiagnostics> steps;  // per t, w.r.t. the final dispatch
  std::vector<std::string> warnings;
};

// Most conservative decomposition: every view active at risk alpha/|N|.
// Throws FrameworkError when even this program is infeasible.
DispatchSchedule presolve(const Case& study, const FrameworkConfig& config);

// Shared engine behind the iterative framework and the single-pass
// uniform-allocation variant. max_passes bounds the number of re-solves.
DispatchSchedule run_framework(const Case& study, const FrameworkConfig& config,
                               AllocationMode mode, int max_passes);

// Full adaptive loop to a fixed point of classification, estimation,
// allocation and dispatch.
DispatchSchedule iterate(const Case& study, const FrameworkConfig& config);

}  // namespace jcc
