#include "jcc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "jcc/errors.hpp"

namespace jcc {

int Network::bus_position(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == bus_id) return static_cast<int>(i);
  }
  return -1;
}

int Network::slack_position() const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].is_slack) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> Network::monitored_positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].monitored) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

template <typename T>
void check_unique_ids(const std::vector<T>& items, const char* what,
                      std::vector<std::string>& issues) {
  std::unordered_set<int> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) {
      issues.push_back(std::string(what) + " id " + std::to_string(item.id) +
                       " is duplicated");
    }
  }
}

}  // namespace

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> issues;

  if (net.horizon < 1) issues.push_back("horizon must be >= 1");
  if (net.buses.empty()) issues.push_back("network has no buses");
  if (net.generators.empty()) issues.push_back("network has no generators");
  if (net.wind_farms.empty()) issues.push_back("network has no wind farms");
  if (net.loads.empty()) issues.push_back("network has no loads");
  if (!(net.base_mva > 0.0)) issues.push_back("base_mva must be > 0");

  check_unique_ids(net.buses, "bus", issues);
  check_unique_ids(net.lines, "line", issues);
  check_unique_ids(net.generators, "generator", issues);
  check_unique_ids(net.wind_farms, "wind farm", issues);
  check_unique_ids(net.loads, "load", issues);

  int slack_count = 0;
  for (const auto& bus : net.buses) {
    if (bus.is_slack) ++slack_count;
  }
  if (slack_count != 1) {
    issues.push_back("exactly one slack bus required, found " +
                     std::to_string(slack_count));
  }

  auto known_bus = [&](int id) { return net.bus_position(id) >= 0; };

  for (const auto& line : net.lines) {
    const std::string tag = "line " + std::to_string(line.id);
    if (!known_bus(line.from_bus))
      issues.push_back(tag + ": unknown from bus " + std::to_string(line.from_bus));
    if (!known_bus(line.to_bus))
      issues.push_back(tag + ": unknown to bus " + std::to_string(line.to_bus));
    if (line.from_bus == line.to_bus)
      issues.push_back(tag + ": from and to bus coincide");
    if (!(line.reactance_pu > 0.0))
      issues.push_back(tag + ": reactance must be > 0");
    if (!(line.limit_lower_mw < line.limit_upper_mw))
      issues.push_back(tag + ": lower limit must be below upper limit");
  }

  for (const auto& gen : net.generators) {
    const std::string tag = "generator " + std::to_string(gen.id);
    if (!known_bus(gen.bus))
      issues.push_back(tag + ": unknown bus " + std::to_string(gen.bus));
    if (gen.g_min_mw > gen.g_max_mw)
      issues.push_back(tag + ": g_min exceeds g_max");
    if (gen.ramp_down_mw > 0.0)
      issues.push_back(tag + ": ramp_down must be <= 0");
    if (gen.ramp_up_mw < 0.0)
      issues.push_back(tag + ": ramp_up must be >= 0");
    if (gen.cost_quad < 0.0)
      issues.push_back(tag + ": quadratic cost must be >= 0");
  }

  for (const auto& farm : net.wind_farms) {
    const std::string tag = "wind farm " + std::to_string(farm.id);
    if (!known_bus(farm.bus))
      issues.push_back(tag + ": unknown bus " + std::to_string(farm.bus));
    if (static_cast<int>(farm.forecast_mw.size()) != net.horizon)
      issues.push_back(tag + ": forecast length " +
                       std::to_string(farm.forecast_mw.size()) +
                       " does not match horizon " + std::to_string(net.horizon));
  }

  for (const auto& load : net.loads) {
    const std::string tag = "load " + std::to_string(load.id);
    if (!known_bus(load.bus))
      issues.push_back(tag + ": unknown bus " + std::to_string(load.bus));
    if (static_cast<int>(load.demand_mw.size()) != net.horizon)
      issues.push_back(tag + ": demand length " +
                       std::to_string(load.demand_mw.size()) +
                       " does not match horizon " + std::to_string(net.horizon));
    for (double d : load.demand_mw) {
      if (d < 0.0) {
        issues.push_back(tag + ": negative demand entry");
        break;
      }
    }
  }

  return issues;
}

void ensure_valid(const Network& net) {
  auto issues = validate_network(net);
  if (!issues.empty()) {
    std::string msg;
    for (const auto& s : issues) {
      if (!msg.empty()) msg += "; ";
      msg += s;
    }
    throw ValidationError(msg);
  }
}

Eigen::VectorXd wind_forecast_at(const Network& net, int t) {
  Eigen::VectorXd w(net.wind_farms.size());
  for (std::size_t k = 0; k < net.wind_farms.size(); ++k)
    w[static_cast<int>(k)] = net.wind_farms[k].forecast_mw.at(t);
  return w;
}

Eigen::VectorXd demand_at(const Network& net, int t) {
  Eigen::VectorXd d(net.loads.size());
  for (std::size_t k = 0; k < net.loads.size(); ++k)
    d[static_cast<int>(k)] = net.loads[k].demand_mw.at(t);
  return d;
}

namespace {

bool connected(const Network& net) {
  const int nb = static_cast<int>(net.buses.size());
  if (nb == 0) return false;
  std::vector<std::vector<int>> adj(nb);
  for (const auto& line : net.lines) {
    int a = net.bus_position(line.from_bus);
    int b = net.bus_position(line.to_bus);
    if (a < 0 || b < 0) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(nb, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == nb;
}

}  // namespace

SensitivityMatrix build_ptdf(const Network& net) {
  ensure_valid(net);
  if (!connected(net)) throw TopologyError("network graph is not connected");

  const int nb = static_cast<int>(net.buses.size());
  const int slack = net.slack_position();

  // Nodal susceptance matrix with the slack row/column removed.
  Eigen::MatrixXd b_full = Eigen::MatrixXd::Zero(nb, nb);
  for (const auto& line : net.lines) {
    const int a = net.bus_position(line.from_bus);
    const int b = net.bus_position(line.to_bus);
    const double y = 1.0 / line.reactance_pu;
    b_full(a, a) += y;
    b_full(b, b) += y;
    b_full(a, b) -= y;
    b_full(b, a) -= y;
  }

  std::vector<int> keep;
  keep.reserve(nb - 1);
  for (int i = 0; i < nb; ++i) {
    if (i != slack) keep.push_back(i);
  }
  Eigen::MatrixXd b_red(nb - 1, nb - 1);
  for (int r = 0; r < nb - 1; ++r)
    for (int c = 0; c < nb - 1; ++c) b_red(r, c) = b_full(keep[r], keep[c]);

  Eigen::LDLT<Eigen::MatrixXd> factor(b_red);
  if (factor.info() != Eigen::Success) {
    throw TopologyError("susceptance system is singular");
  }

  const auto monitored = net.monitored_positions();
  const int nl = static_cast<int>(monitored.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nw = static_cast<int>(net.wind_farms.size());
  const int nd = static_cast<int>(net.loads.size());

  SensitivityMatrix sens;
  sens.line_ids.reserve(nl);
  sens.gen.resize(nl, ng);
  sens.wind.resize(nl, nw);
  sens.load.resize(nl, nd);

  for (int r = 0; r < nl; ++r) {
    const Line& line = net.lines[monitored[r]];
    sens.line_ids.push_back(line.id);

    // Flow on (f,t) from angles: (theta_f - theta_t)/x. Solve for the
    // sensitivity of that expression to each non-slack injection.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb - 1);
    const double y = 1.0 / line.reactance_pu;
    const int f = net.bus_position(line.from_bus);
    const int to = net.bus_position(line.to_bus);
    for (int k = 0; k < nb - 1; ++k) {
      if (keep[k] == f) rhs[k] += y;
      if (keep[k] == to) rhs[k] -= y;
    }
    Eigen::VectorXd psi_red = factor.solve(rhs);
    if (!psi_red.allFinite()) {
      throw TopologyError("susceptance solve produced non-finite factors");
    }

    Eigen::VectorXd psi = Eigen::VectorXd::Zero(nb);  // slack entry stays 0
    for (int k = 0; k < nb - 1; ++k) psi[keep[k]] = psi_red[k];

    for (int k = 0; k < ng; ++k)
      sens.gen(r, k) = psi[net.bus_position(net.generators[k].bus)];
    for (int k = 0; k < nw; ++k)
      sens.wind(r, k) = psi[net.bus_position(net.wind_farms[k].bus)];
    for (int k = 0; k < nd; ++k)
      sens.load(r, k) = -psi[net.bus_position(net.loads[k].bus)];
  }

  return sens;
}

Eigen::VectorXd line_flows(const SensitivityMatrix& sens,
                           const Eigen::VectorXd& gen_mw,
                           const Eigen::VectorXd& wind_mw,
                           const Eigen::VectorXd& load_mw) {
  if (gen_mw.size() != sens.gen.cols() || wind_mw.size() != sens.wind.cols() ||
      load_mw.size() != sens.load.cols()) {
    throw ValidationError("line_flows: injection vector sizes do not match");
  }
  return sens.gen * gen_mw + sens.wind * wind_mw + sens.load * load_mw;
}

std::vector<ConstraintView> constraint_views(const Network& net) {
  const auto monitored = net.monitored_positions();
  if (monitored.empty()) {
    throw ValidationError("constraint_views: monitored line set is empty");
  }
  std::vector<ConstraintView> views;
  views.reserve(2 * monitored.size());
  for (std::size_t r = 0; r < monitored.size(); ++r) {
    const Line& line = net.lines[monitored[r]];
    ConstraintView up;
    up.index = static_cast<int>(2 * r + 1);
    up.line_row = static_cast<int>(r);
    up.line_id = line.id;
    up.sign = 1.0;
    up.bound_mw = line.limit_upper_mw;
    views.push_back(up);

    ConstraintView down;
    down.index = static_cast<int>(2 * r + 2);
    down.line_row = static_cast<int>(r);
    down.line_id = line.id;
    down.sign = -1.0;
    down.bound_mw = -line.limit_lower_mw;
    views.push_back(down);
  }
  return views;
}

}  // namespace jcc
