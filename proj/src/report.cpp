#include "jcc/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jcc/errors.hpp"

namespace jcc {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError({path + ": cannot open for writing"});
  return out;
}

}  // namespace

void write_dispatch_csv(const std::string& path, const Network& net,
                        const DispatchSchedule& schedule) {
  auto out = open_out(path);
  out << "t,gen_id,mw\n";
  for (std::size_t t = 0; t < schedule.dispatch.size(); ++t) {
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
      out << t << "," << net.generators[k].id << ","
          << format_double(schedule.dispatch[t][static_cast<int>(k)]) << "\n";
    }
  }
}

std::vector<Eigen::VectorXd> read_dispatch_csv(const std::string& path,
                                               const Network& net) {
  std::ifstream in(path);
  if (!in) throw ParseError({path + ": cannot open dispatch file"});
  std::string header;
  std::getline(in, header);
  if (header != "t,gen_id,mw") {
    throw ParseError({path + ": expected header t,gen_id,mw"});
  }
  const int ng = static_cast<int>(net.generators.size());
  std::vector<Eigen::VectorXd> dispatch(
      net.horizon, Eigen::VectorXd::Constant(ng, std::nan("")));
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ls(line);
    int t, gen_id;
    double mw;
    char c1, c2;
    if (!(ls >> t >> c1 >> gen_id >> c2 >> mw) || c1 != ',' || c2 != ',') {
      throw ParseError({path + ":" + std::to_string(line_no) + ": bad row"});
    }
    if (t < 0 || t >= net.horizon) {
      throw ParseError({path + ":" + std::to_string(line_no) +
                        ": time step out of range"});
    }
    int k = -1;
    for (int i = 0; i < ng; ++i) {
      if (net.generators[i].id == gen_id) k = i;
    }
    if (k < 0) {
      throw ParseError({path + ":" + std::to_string(line_no) +
                        ": unknown generator id " + std::to_string(gen_id)});
    }
    dispatch[t][k] = mw;
  }
  for (int t = 0; t < net.horizon; ++t) {
    if (!dispatch[t].allFinite()) {
      throw ParseError({path + ": incomplete dispatch at t=" +
                        std::to_string(t)});
    }
  }
  return dispatch;
}

void write_trace_csv(const std::string& path, const DispatchSchedule& schedule) {
  auto out = open_out(path);
  out << "iter,objective,sum_Np,sum_E,wall_ms\n";
  for (const auto& rec : schedule.trace) {
    out << rec.iter << "," << format_double(rec.objective) << ","
        << rec.sum_possible << "," << format_double(rec.sum_correction) << ","
        << format_double(rec.wall_ms) << "\n";
  }
}

void write_summary_csv(const std::string& path, const std::string& method,
                       const DispatchSchedule& schedule, double wall_ms) {
  auto out = open_out(path);
  out << "method,objective,iterations,converged,status,wall_ms\n";
  out << method << "," << format_double(schedule.objective) << ","
      << schedule.iterations << "," << (schedule.converged ? 1 : 0) << ","
      << schedule.status << "," << format_double(wall_ms) << "\n";
}

void write_pos_csv(const std::string& path,
                   const std::vector<PosReport>& reports) {
  auto out = open_out(path);
  out << "method,t,pos,half_width,pass\n";
  for (const auto& report : reports) {
    for (const auto& entry : report.entries) {
      out << report.method << "," << entry.t << "," << format_double(entry.pos)
          << "," << format_double(entry.half_width) << ","
          << (entry.pass ? 1 : 0) << "\n";
    }
  }
}

void write_cost_csv(const std::string& path, const CostReport& report) {
  auto out = open_out(path);
  out << "method,objective,gap\n";
  for (const auto& row : report.rows) {
    if (row.ok) {
      out << row.method << "," << format_double(row.objective) << ","
          << format_double(row.gap) << "\n";
    } else {
      out << row.method << ",error,error\n";
    }
  }
}

void write_violations_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<ViolationCell>>>&
        attribution,
    int n_eval) {
  auto out = open_out(path);
  out << "method,t,view,line_id,direction,count,frequency\n";
  for (const auto& [method, cells] : attribution) {
    for (const auto& cell : cells) {
      out << method << "," << cell.t << "," << cell.view_index << ","
          << cell.line_id << "," << cell.direction << "," << cell.count << ","
          << format_double(static_cast<double>(cell.count) / n_eval) << "\n";
    }
  }
}

}  // namespace jcc
