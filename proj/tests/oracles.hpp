// Test-only reference implementations. Each one recomputes a result along a
// route independent of the library code it checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "jcc/decomposition.hpp"
#include "jcc/grid.hpp"
#include "jcc/qp.hpp"

namespace oracles {

// Inverse normal CDF by bisection on erfc. ~1e-13 absolute after 100 halvings.
inline double quantile_bisect(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// DC flows by solving the reduced angle system directly (no distribution
// factors): injections per bus position, slack absorbs the mismatch.
inline Eigen::VectorXd dc_flows_direct(const jcc::Network& net,
                                       const Eigen::VectorXd& injection_mw) {
  const int nb = static_cast<int>(net.buses.size());
  const int slack = net.slack_position();
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
  for (int i = 0; i < nb; ++i)
    if (i != slack) keep.push_back(i);
  const int m = nb - 1;
  Eigen::MatrixXd b_red(m, m);
  Eigen::VectorXd p_red(m);
  for (int r = 0; r < m; ++r) {
    p_red[r] = injection_mw[keep[r]];
    for (int c = 0; c < m; ++c) b_red(r, c) = b_full(keep[r], keep[c]);
  }
  const Eigen::VectorXd theta_red = b_red.fullPivLu().solve(p_red);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(nb);
  for (int r = 0; r < m; ++r) theta[keep[r]] = theta_red[r];

  Eigen::VectorXd flows(net.lines.size());
  for (std::size_t i = 0; i < net.lines.size(); ++i) {
    const auto& line = net.lines[i];
    flows[static_cast<int>(i)] =
        (theta[net.bus_position(line.from_bus)] -
         theta[net.bus_position(line.to_bus)]) /
        line.reactance_pu;
  }
  return flows;
}

// Literal alternating-sum aggregation of the joint-violation terms over every
// subset of size >= 2, in exact 1/N_s units.
inline long overlap_mass_brute_force(const jcc::ViolationMatrix& vm, int t,
                                     const std::vector<int>& possible) {
  const int k = static_cast<int>(possible.size());
  long total = 0;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < 2) continue;
    std::vector<int> subset;
    for (int j = 0; j < k; ++j) {
      if (mask & (1u << j)) subset.push_back(possible[j]);
    }
    const long joint = jcc::joint_violation_count(vm, t, subset);
    total += (size % 2 == 0) ? joint : -joint;
  }
  return total;
}

// Global minimum of a small strictly convex QP by enumerating candidate
// active sets and solving each KKT equality system with a rank check.
struct BruteQpResult {
  bool found = false;
  double objective = 0.0;
  Eigen::VectorXd x;
};

inline BruteQpResult qp_brute_force(const jcc::QuadraticProgram& qp) {
  const int n = qp.num_vars();
  const int m = qp.num_rows();
  BruteQpResult best;

  std::vector<int> rows(m);
  for (int i = 0; i < m; ++i) rows[i] = i;

  const double feas_tol = 1e-7 * (1.0 + (m ? qp.b.cwiseAbs().maxCoeff() : 0.0));

  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    const int k = __builtin_popcount(mask);
    if (k > n) continue;
    std::vector<int> active;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) active.push_back(i);

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    for (int i = 0; i < n; ++i) kkt(i, i) = 2.0 * qp.quad[i];
    for (int j = 0; j < k; ++j) {
      kkt.block(0, n + j, n, 1) = qp.a.row(active[j]).transpose();
      kkt.block(n + j, 0, 1, n) = qp.a.row(active[j]);
    }
    Eigen::VectorXd rhs(n + k);
    rhs.head(n) = -qp.lin;
    for (int j = 0; j < k; ++j) rhs[n + j] = qp.b[active[j]];

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd u = lu.solve(rhs);
    const Eigen::VectorXd x = u.head(n);
    const Eigen::VectorXd mu = u.tail(k);

    if (k > 0 && mu.minCoeff() < -1e-9) continue;
    if (m > 0 && (qp.a * x - qp.b).maxCoeff() > feas_tol) continue;

    const double obj = qp.quad.dot(x.cwiseProduct(x)) + qp.lin.dot(x) +
                       qp.constant;
    if (!best.found || obj < best.objective) {
      best.found = true;
      best.objective = obj;
      best.x = x;
    }
  }
  return best;
}

// Random connected network on nb buses: a spanning tree plus extra chords.
inline jcc::Network random_network(std::mt19937_64& rng, int nb) {
  std::uniform_real_distribution<double> unit(0.2, 2.0);
  jcc::Network net;
  net.horizon = 1;
  for (int i = 0; i < nb; ++i) net.buses.push_back({i + 1, i == 0});
  int line_id = 1;
  for (int i = 1; i < nb; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    const int parent = pick(rng);
    net.lines.push_back({line_id++, parent + 1, i + 1, unit(rng), 500.0,
                         -500.0, true});
  }
  std::uniform_int_distribution<int> pick(1, nb);
  const int extra = nb / 2;
  for (int e = 0; e < extra; ++e) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    net.lines.push_back({line_id++, a, b, unit(rng), 500.0, -500.0, true});
  }
  net.generators.push_back({1, 1, 0.0, 300.0, -100.0, 100.0, 0.01, 10.0, 0.0});
  net.wind_farms.push_back({1, nb, {50.0}});
  net.loads.push_back({1, std::max(2, nb / 2), {60.0}});
  return net;
}

}  // namespace oracles
