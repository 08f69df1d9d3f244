#pragma once

#include <string>
#include <vector>

#include "jcc/decomposition.hpp"

namespace jcc {

enum class MethodId { kNoJcc, kBoole, kImprovedBoole, kImprovingBound, kIterative };

std::string to_string(MethodId id);
MethodId method_from_string(const std::string& name);
std::vector<MethodId> all_methods();

// Line limits ignored entirely: capacity, ramp and adequacy rows only.
DispatchSchedule solve_no_jcc(const Case& study, const FrameworkConfig& config);

// Union bound: every view at risk alpha/|N|. Identical to presolve by
// construction (one shared implementation).
DispatchSchedule solve_boole(const Case& study, const FrameworkConfig& config);

// Union bound relaxed by the estimated all-event joint violation J: one
// presolve, then every view at (alpha + J)/|N|. J = 0 reproduces solve_boole
// exactly (both limit directions of a line cannot violate together, so on
// real cases J is always zero).
DispatchSchedule solve_improved_boole(const Case& study,
                                      const FrameworkConfig& config);

double improved_boole_risk(double alpha, double joint_all_views, int n_views);

// One classification/estimation pass after presolve, binding views only,
// uniform shares. No iteration: the dispatch it returns may be inconsistent
// with the classification it was built from.
DispatchSchedule solve_improving_bound(const Case& study,
                                       const FrameworkConfig& config);

DispatchSchedule run_method(MethodId id, const Case& study,
                            const FrameworkConfig& config);

}  // namespace jcc
