#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jcc {

struct Bus {
  int id = 0;
  bool is_slack = false;
};

struct Line {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double reactance_pu = 0.0;
  double limit_upper_mw = 0.0;
  double limit_lower_mw = 0.0;  // typically negative
  bool monitored = false;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double g_min_mw = 0.0;
  double g_max_mw = 0.0;
  double ramp_down_mw = 0.0;  // <= 0
  double ramp_up_mw = 0.0;    // >= 0
  double cost_quad = 0.0;     // $/MW^2
  double cost_lin = 0.0;      // $/MW
  double cost_const = 0.0;    // $
};

struct WindFarm {
  int id = 0;
  int bus = 0;
  std::vector<double> forecast_mw;  // one entry per time step
};

struct LoadPoint {
  int id = 0;
  int bus = 0;
  std::vector<double> demand_mw;  // one entry per time step, >= 0
};

// Static multi-period system description. Immutable once built; every
// operation on it is a pure function.
struct Network {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<WindFarm> wind_farms;
  std::vector<LoadPoint> loads;
  int horizon = 0;

  int bus_position(int bus_id) const;  // index into buses, -1 if unknown
  int slack_position() const;          // -1 if none
  // Positions (into lines) of the monitored set, in declaration order.
  std::vector<int> monitored_positions() const;
};

// Every structural problem found; empty when the network is valid.
std::vector<std::string> validate_network(const Network& net);
// Throws ValidationError listing all problems at once.
void ensure_valid(const Network& net);

Eigen::VectorXd wind_forecast_at(const Network& net, int t);
Eigen::VectorXd demand_at(const Network& net, int t);

// Injection-to-flow factors for each monitored line, partitioned by where
// generators, wind farms and loads sit. Row order follows
// Network::monitored_positions(). Flow orientation is from->to positive.
// Load columns are withdrawal factors (negated injection sensitivity), so a
// flow is gen*g + wind*w + load*d with demand entered as positive numbers.
struct SensitivityMatrix {
  std::vector<int> line_ids;
  Eigen::MatrixXd gen;   // |L| x N_g
  Eigen::MatrixXd wind;  // |L| x N_w
  Eigen::MatrixXd load;  // |L| x N_d

  int monitored_count() const { return static_cast<int>(line_ids.size()); }
};

// Signed single-constraint view of a monitored line. n runs 1..2|L|; odd n is
// the upper limit of monitored line (n+1)/2, even n the lower limit with the
// sign flipped, so a violation is always sign*flow > bound_mw.
struct ConstraintView {
  int index = 0;     // n
  int line_row = 0;  // row in SensitivityMatrix
  int line_id = 0;
  double sign = 1.0;
  double bound_mw = 0.0;
};

// Dense distribution-factor computation from the reduced susceptance matrix
// (slack row/column removed). Throws TopologyError when the graph is
// disconnected, ValidationError when the network itself is malformed.
SensitivityMatrix build_ptdf(const Network& net);

// Flows on the monitored lines for one time step. Pure linear map.
Eigen::VectorXd line_flows(const SensitivityMatrix& sens,
                           const Eigen::VectorXd& gen_mw,
                           const Eigen::VectorXd& wind_mw,
                           const Eigen::VectorXd& load_mw);

std::vector<ConstraintView> constraint_views(const Network& net);

}  // namespace jcc
