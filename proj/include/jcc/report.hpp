#pragma once

#include <string>
#include <vector>

#include "jcc/decomposition.hpp"
#include "jcc/evaluation.hpp"
#include "jcc/grid.hpp"

namespace jcc {

// All CSV numbers go through one formatter (10 significant digits, %.10g) so
// identical runs produce identical bytes.
std::string format_double(double v);

void write_dispatch_csv(const std::string& path, const Network& net,
                        const DispatchSchedule& schedule);
std::vector<Eigen::VectorXd> read_dispatch_csv(const std::string& path,
                                               const Network& net);

// iter,objective,sum_Np,sum_E,wall_ms. The wall_ms column is wall-clock and
// is the one output field excluded from the byte-identical guarantee.
void write_trace_csv(const std::string& path, const DispatchSchedule& schedule);

void write_summary_csv(const std::string& path, const std::string& method,
                       const DispatchSchedule& schedule, double wall_ms);

void write_pos_csv(const std::string& path,
                   const std::vector<PosReport>& reports);
void write_cost_csv(const std::string& path, const CostReport& report);
void write_violations_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<ViolationCell>>>&
        attribution,
    int n_eval);

}  // namespace jcc
