#include "jcc/caseio.hpp"

#include <fstream>
#include <set>

#include "jcc/errors.hpp"
#include "jcc/uncertainty.hpp"

namespace jcc {

using nlohmann::json;

namespace {

class Collector {
 public:
  void add(const std::string& msg) { issues_.push_back(msg); }
  bool ok() const { return issues_.empty(); }
  void throw_if_any() const {
    if (!issues_.empty()) throw ParseError(issues_);
  }
  std::vector<std::string>& issues() { return issues_; }

 private:
  std::vector<std::string> issues_;
};

double require_number(const json& obj, const std::string& key,
                      const std::string& where, Collector& issues) {
  if (!obj.contains(key)) {
    issues.add(where + ": missing field '" + key + "'");
    return 0.0;
  }
  if (!obj[key].is_number()) {
    issues.add(where + "." + key + ": expected a number");
    return 0.0;
  }
  return obj[key].get<double>();
}

int require_int(const json& obj, const std::string& key,
                const std::string& where, Collector& issues) {
  if (!obj.contains(key)) {
    issues.add(where + ": missing field '" + key + "'");
    return 0;
  }
  if (!obj[key].is_number_integer()) {
    issues.add(where + "." + key + ": expected an integer");
    return 0;
  }
  return obj[key].get<int>();
}

std::vector<double> require_array(const json& obj, const std::string& key,
                                  const std::string& where, Collector& issues) {
  std::vector<double> out;
  if (!obj.contains(key) || !obj[key].is_array()) {
    issues.add(where + ": missing numeric array '" + key + "'");
    return out;
  }
  for (const auto& v : obj[key]) {
    if (!v.is_number()) {
      issues.add(where + "." + key + ": non-numeric entry");
      return {};
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::MatrixXd parse_matrix(const json& m, const std::string& where,
                             Collector& issues) {
  if (!m.is_array() || m.empty() || !m[0].is_array()) {
    issues.add(where + ": expected a matrix (array of rows)");
    return {};
  }
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!m[r].is_array() || static_cast<int>(m[r].size()) != cols) {
      issues.add(where + ": ragged matrix rows");
      return {};
    }
    for (int c = 0; c < cols; ++c) {
      if (!m[r][c].is_number()) {
        issues.add(where + ": non-numeric matrix entry");
        return {};
      }
      out(r, c) = m[r][c].get<double>();
    }
  }
  return out;
}

}  // namespace

Case parse_case_json(const json& doc, const std::string& origin) {
  Collector issues;
  Case study;
  Network& net = study.network;

  if (!doc.is_object()) {
    throw ParseError({origin + ": top level must be an object"});
  }

  net.base_mva = doc.contains("base_mva")
                     ? require_number(doc, "base_mva", origin, issues)
                     : 100.0;

  for (const char* section : {"buses", "lines", "generators", "wind", "loads"}) {
    if (!doc.contains(section) || !doc[section].is_array()) {
      issues.add(origin + ": missing section '" + std::string(section) + "'");
    }
  }
  if (!doc.contains("uncertainty") || !doc["uncertainty"].is_object()) {
    issues.add(origin + ": missing section 'uncertainty'");
  }
  issues.throw_if_any();  // cannot proceed without the sections

  for (std::size_t i = 0; i < doc["buses"].size(); ++i) {
    const auto& b = doc["buses"][i];
    const std::string where = "buses[" + std::to_string(i) + "]";
    Bus bus;
    bus.id = require_int(b, "id", where, issues);
    bus.is_slack = b.value("slack", false);
    net.buses.push_back(bus);
  }

  bool any_monitor_key = false;
  for (const auto& l : doc["lines"]) {
    if (l.contains("monitored")) any_monitor_key = true;
  }
  for (std::size_t i = 0; i < doc["lines"].size(); ++i) {
    const auto& l = doc["lines"][i];
    const std::string where = "lines[" + std::to_string(i) + "]";
    Line line;
    line.id = require_int(l, "id", where, issues);
    line.from_bus = require_int(l, "from", where, issues);
    line.to_bus = require_int(l, "to", where, issues);
    line.reactance_pu = require_number(l, "reactance_pu", where, issues);
    line.limit_upper_mw = require_number(l, "limit_mw_upper", where, issues);
    line.limit_lower_mw = require_number(l, "limit_mw_lower", where, issues);
    line.monitored = l.value("monitored", false);
    net.lines.push_back(line);
  }

  for (std::size_t i = 0; i < doc["generators"].size(); ++i) {
    const auto& g = doc["generators"][i];
    const std::string where = "generators[" + std::to_string(i) + "]";
    Generator gen;
    gen.id = require_int(g, "id", where, issues);
    gen.bus = require_int(g, "bus", where, issues);
    gen.g_min_mw = require_number(g, "g_min_mw", where, issues);
    gen.g_max_mw = require_number(g, "g_max_mw", where, issues);
    gen.ramp_down_mw = require_number(g, "ramp_down_mw", where, issues);
    gen.ramp_up_mw = require_number(g, "ramp_up_mw", where, issues);
    gen.cost_quad = require_number(g, "c2", where, issues);
    gen.cost_lin = require_number(g, "c1", where, issues);
    gen.cost_const = require_number(g, "c0", where, issues);
    net.generators.push_back(gen);
  }

  for (std::size_t i = 0; i < doc["wind"].size(); ++i) {
    const auto& w = doc["wind"][i];
    const std::string where = "wind[" + std::to_string(i) + "]";
    WindFarm farm;
    farm.id = require_int(w, "id", where, issues);
    farm.bus = require_int(w, "bus", where, issues);
    farm.forecast_mw = require_array(w, "forecast_mw", where, issues);
    net.wind_farms.push_back(farm);
  }

  for (std::size_t i = 0; i < doc["loads"].size(); ++i) {
    const auto& l = doc["loads"][i];
    const std::string where = "loads[" + std::to_string(i) + "]";
    LoadPoint load;
    load.id = require_int(l, "id", where, issues);
    load.bus = require_int(l, "bus", where, issues);
    load.demand_mw = require_array(l, "demand_mw", where, issues);
    net.loads.push_back(load);
  }

  // Horizon is the first wind forecast's length; every series must match.
  net.horizon = net.wind_farms.empty()
                    ? 0
                    : static_cast<int>(net.wind_farms[0].forecast_mw.size());

  // Default monitored set: lines touching a wind bus, used only when the
  // case marks nothing explicitly.
  if (!any_monitor_key) {
    std::set<int> wind_buses;
    for (const auto& farm : net.wind_farms) wind_buses.insert(farm.bus);
    for (auto& line : net.lines) {
      line.monitored = wind_buses.count(line.from_bus) > 0 ||
                       wind_buses.count(line.to_bus) > 0;
    }
  }

  const auto& unc = doc["uncertainty"];
  if (!unc.contains("covariance_mw2")) {
    issues.add(origin + ".uncertainty: missing field 'covariance_mw2'");
  } else {
    const auto& cov = unc["covariance_mw2"];
    const bool per_step = cov.is_array() && !cov.empty() && cov[0].is_array() &&
                          !cov[0].empty() && cov[0][0].is_array();
    if (per_step) {
      for (std::size_t t = 0; t < cov.size(); ++t) {
        Eigen::MatrixXd m = parse_matrix(
            cov[t], "uncertainty.covariance_mw2[" + std::to_string(t) + "]",
            issues);
        if (issues.ok()) study.uncertainty.covariances.push_back(m);
      }
      if (issues.ok() &&
          static_cast<int>(study.uncertainty.covariances.size()) !=
              net.horizon) {
        issues.add("uncertainty.covariance_mw2: per-step list length " +
                   std::to_string(study.uncertainty.covariances.size()) +
                   " does not match horizon " + std::to_string(net.horizon));
      }
    } else {
      Eigen::MatrixXd m =
          parse_matrix(cov, "uncertainty.covariance_mw2", issues);
      if (issues.ok()) study.uncertainty.covariances.push_back(m);
    }
  }

  if (issues.ok()) {
    const int nw = static_cast<int>(net.wind_farms.size());
    for (const auto& sigma : study.uncertainty.covariances) {
      if (sigma.rows() != nw || sigma.cols() != nw) {
        issues.add("uncertainty.covariance_mw2: size " +
                   std::to_string(sigma.rows()) + "x" +
                   std::to_string(sigma.cols()) + " does not match " +
                   std::to_string(nw) + " wind farms");
        break;
      }
      try {
        factor_covariance(sigma);
      } catch (const ModelError& err) {
        issues.add(std::string("uncertainty.covariance_mw2: ") + err.what());
        break;
      }
    }
  }

  for (const auto& msg : validate_network(net)) issues.add(origin + ": " + msg);
  issues.throw_if_any();
  return study;
}

Case parse_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError({path + ": cannot open case file"});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& err) {
    throw ParseError({path + ": " + err.what()});
  }
  return parse_case_json(doc, path);
}

json serialize_case(const Case& study) {
  const Network& net = study.network;
  json doc;
  doc["base_mva"] = net.base_mva;
  doc["buses"] = json::array();
  for (const auto& bus : net.buses) {
    doc["buses"].push_back({{"id", bus.id}, {"slack", bus.is_slack}});
  }
  doc["lines"] = json::array();
  for (const auto& line : net.lines) {
    doc["lines"].push_back({{"id", line.id},
                            {"from", line.from_bus},
                            {"to", line.to_bus},
                            {"reactance_pu", line.reactance_pu},
                            {"limit_mw_upper", line.limit_upper_mw},
                            {"limit_mw_lower", line.limit_lower_mw},
                            {"monitored", line.monitored}});
  }
  doc["generators"] = json::array();
  for (const auto& gen : net.generators) {
    doc["generators"].push_back({{"id", gen.id},
                                 {"bus", gen.bus},
                                 {"g_min_mw", gen.g_min_mw},
                                 {"g_max_mw", gen.g_max_mw},
                                 {"ramp_down_mw", gen.ramp_down_mw},
                                 {"ramp_up_mw", gen.ramp_up_mw},
                                 {"c2", gen.cost_quad},
                                 {"c1", gen.cost_lin},
                                 {"c0", gen.cost_const}});
  }
  doc["wind"] = json::array();
  for (const auto& farm : net.wind_farms) {
    doc["wind"].push_back(
        {{"id", farm.id}, {"bus", farm.bus}, {"forecast_mw", farm.forecast_mw}});
  }
  doc["loads"] = json::array();
  for (const auto& load : net.loads) {
    doc["loads"].push_back(
        {{"id", load.id}, {"bus", load.bus}, {"demand_mw", load.demand_mw}});
  }
  auto matrix_to_json = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  if (study.uncertainty.shared()) {
    doc["uncertainty"]["covariance_mw2"] =
        matrix_to_json(study.uncertainty.covariances[0]);
  } else {
    json list = json::array();
    for (const auto& sigma : study.uncertainty.covariances) {
      list.push_back(matrix_to_json(sigma));
    }
    doc["uncertainty"]["covariance_mw2"] = list;
  }
  return doc;
}

void save_case(const Case& study, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError({path + ": cannot open for writing"});
  out << serialize_case(study).dump(2) << "\n";
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError({path + ": cannot open config file"});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& err) {
    throw ParseError({path + ": " + err.what()});
  }
  RunConfig config;
  config.alpha = doc.value("alpha", config.alpha);
  config.epsilon = doc.value("epsilon", config.epsilon);
  config.n_samples = doc.value("samples", config.n_samples);
  config.n_eval = doc.value("eval_samples", config.n_eval);
  config.seed = doc.value("seed", config.seed);
  config.eval_seed = doc.value("eval_seed", config.eval_seed);
  config.tolerance = doc.value("tol", config.tolerance);
  config.max_iter = doc.value("max_iter", config.max_iter);
  config.out_dir = doc.value("out", config.out_dir);
  if (doc.contains("methods")) {
    for (const auto& m : doc["methods"]) {
      config.methods.push_back(m.get<std::string>());
    }
  }
  return config;
}

void check_run_config(const RunConfig& config) {
  std::vector<std::string> issues;
  if (!(config.alpha > 0.0 && config.alpha < 0.5)) {
    issues.push_back("alpha must lie in (0, 0.5)");
  }
  if (!(config.epsilon > 0.0 && config.epsilon < 0.5)) {
    issues.push_back("epsilon must lie in (0, 0.5)");
  }
  if (config.n_samples < 1) issues.push_back("samples must be >= 1");
  if (config.n_eval < 1) issues.push_back("eval_samples must be >= 1");
  if (!(config.tolerance > 0.0)) issues.push_back("tol must be > 0");
  if (config.max_iter < 1) issues.push_back("max_iter must be >= 1");
  if (config.seed == config.eval_seed) {
    issues.push_back("seed and eval_seed must differ");
  }
  if (!issues.empty()) {
    std::string msg;
    for (const auto& s : issues) {
      if (!msg.empty()) msg += "; ";
      msg += s;
    }
    throw ValidationError(msg);
  }
}

}  // namespace jcc
