#include "doctest.h"

#include <random>
#include <stdexcept>

#include "jcc/errors.hpp"
#include "jcc/normal.hpp"
#include "jcc/reform.hpp"
#include "jcc/rng.hpp"
#include "oracles.hpp"

using namespace jcc;

TEST_CASE("quantile at one half is zero") {
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("quantile matches the bisection reference") {
  CHECK(std_normal_quantile(0.95) ==
        doctest::Approx(oracles::quantile_bisect(0.95)).epsilon(1e-10));
  CHECK(std_normal_quantile(0.95) == doctest::Approx(1.6449).epsilon(1e-4));
  CHECK(std_normal_quantile(0.9999) ==
        doctest::Approx(oracles::quantile_bisect(0.9999)).epsilon(1e-10));
  CHECK(std_normal_quantile(0.9999) == doctest::Approx(3.7190).epsilon(1e-4));
}

TEST_CASE("quantile round-trip through the CDF stays within 1e-10") {
  for (double p : {1e-8, 1e-5, 1e-3, 0.01, 0.2, 0.5, 0.8, 0.99, 0.999, 1 - 1e-6}) {
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(p)) - p) < 1e-10);
  }
}

TEST_CASE("quantile rejects arguments outside the open unit interval") {
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
}

namespace {

ConstraintView upper_view() {
  ConstraintView view;
  view.index = 1;
  view.line_row = 0;
  view.line_id = 1;
  view.sign = 1.0;
  view.bound_mw = 100.0;
  return view;
}

SensitivityMatrix unit_sens(int nw) {
  SensitivityMatrix sens;
  sens.line_ids = {1};
  sens.gen = Eigen::MatrixXd::Ones(1, 1);
  sens.wind = Eigen::MatrixXd::Zero(1, nw);
  sens.wind(0, 0) = 1.0;
  sens.load = Eigen::MatrixXd::Zero(1, 1);
  return sens;
}

}  // namespace

TEST_CASE("risk one half gives the nominal constraint") {
  const auto sens = unit_sens(2);
  Eigen::VectorXd wbar(2), d(1);
  wbar << 10.0, 5.0;
  d << 0.0;
  const auto tc = tighten_line_scc(upper_view(), 0, 0.5, sens,
                                   Eigen::MatrixXd::Identity(2, 2), wbar, d);
  CHECK(tc.margin_mw == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(tc.rhs == doctest::Approx(100.0 - 10.0).epsilon(1e-9));
}

TEST_CASE("unit wind exposure at 5% risk adds the 1.6449 MW margin") {
  const auto sens = unit_sens(2);
  Eigen::VectorXd wbar(2), d(1);
  wbar << 0.0, 0.0;
  d << 0.0;
  const auto tc = tighten_line_scc(upper_view(), 0, 0.05, sens,
                                   Eigen::MatrixXd::Identity(2, 2), wbar, d);
  CHECK(tc.margin_mw == doctest::Approx(1.6449).epsilon(1e-4));
}

TEST_CASE("no uncertainty means no margin at any risk") {
  const auto sens = unit_sens(1);
  Eigen::VectorXd wbar(1), d(1);
  wbar << 20.0;
  d << 0.0;
  for (double risk : {0.01, 0.1, 0.4}) {
    const auto tc = tighten_line_scc(upper_view(), 0, risk, sens,
                                     Eigen::MatrixXd::Zero(1, 1), wbar, d);
    CHECK(tc.margin_mw == 0.0);
  }
}

TEST_CASE("margins decrease strictly as risk grows") {
  const auto sens = unit_sens(1);
  Eigen::VectorXd wbar(1), d(1);
  wbar << 0.0;
  d << 0.0;
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(1, 1) * 4.0;
  double previous = 1e300;
  for (double risk : {0.01, 0.05, 0.1, 0.25, 0.5}) {
    const auto tc = tighten_line_scc(upper_view(), 0, risk, sens, sigma, wbar, d);
    CHECK(tc.margin_mw < previous);
    previous = tc.margin_mw;
  }
}

TEST_CASE("line risk outside (0, 0.5] is a domain error") {
  const auto sens = unit_sens(1);
  Eigen::VectorXd wbar(1), d(1);
  wbar << 0.0;
  d << 0.0;
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(tighten_line_scc(upper_view(), 0, 0.0, sens, sigma, wbar, d),
                  std::domain_error);
  CHECK_THROWS_AS(tighten_line_scc(upper_view(), 0, 0.6, sens, sigma, wbar, d),
                  std::domain_error);
}

TEST_CASE("balance margin is quantile times the aggregate deviation") {
  Eigen::VectorXd wbar(2), d(2);
  wbar << 10.0, 10.0;
  d << 30.0, 10.0;

  SUBCASE("no uncertainty: nominal adequacy") {
    const auto bal =
        tighten_balance_scc(0, 1e-4, Eigen::MatrixXd::Zero(2, 2), wbar, d, 3);
    CHECK(bal.margin_mw == 0.0);
    // 1^T g >= 40 - 20 = 20, stored as -1^T g <= -20.
    CHECK(bal.rhs == doctest::Approx(-20.0));
    CHECK(bal.row.size() == 3);
    CHECK(bal.row[0] == -1.0);
  }

  SUBCASE("aggregate variance 4 at eps=1e-4 gives margin 7.4380") {
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2) * 2.0;
    // 1^T Sigma 1 = 4.
    const auto bal = tighten_balance_scc(0, 1e-4, sigma, wbar, d, 3);
    CHECK(bal.margin_mw == doctest::Approx(2.0 * 3.7190).epsilon(1e-4));
  }

  SUBCASE("eps close to one half erases the margin") {
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
    const auto bal = tighten_balance_scc(0, 0.499999, sigma, wbar, d, 3);
    CHECK(bal.margin_mw == doctest::Approx(0.0).epsilon(1e-4));
  }

  SUBCASE("eps domain") {
    CHECK_THROWS_AS(
        tighten_balance_scc(0, 0.0, Eigen::MatrixXd::Zero(2, 2), wbar, d, 3),
        std::domain_error);
    CHECK_THROWS_AS(
        tighten_balance_scc(0, 0.5, Eigen::MatrixXd::Zero(2, 2), wbar, d, 3),
        std::domain_error);
  }
}

TEST_CASE("boundary dispatch violates at the design frequency") {
  // A point sitting exactly on the tightened boundary must see the original
  // constraint violated with frequency ~risk under fresh Gaussian noise.
  std::mt19937_64 setup(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double risk : {0.5, 0.1, 0.05}) {
    Eigen::MatrixXd root(2, 2);
    root << 2.0, 0.0, 0.7, 1.1;
    const Eigen::MatrixXd sigma = root * root.transpose();
    Eigen::VectorXd lambda(2);
    lambda << gauss(setup), gauss(setup);

    const double variance = lambda.dot(sigma * lambda);
    const double margin = std_normal_quantile(1.0 - risk) * std::sqrt(variance);

    // x + lambda^T delta > x_plus with x = x_plus - margin.
    const int n = 200000;
    auto stream = make_stream(4242, 0);
    int violations = 0;
    for (int s = 0; s < n; ++s) {
      Eigen::VectorXd z(2);
      z << std_normal_quantile(uniform_open(stream())),
          std_normal_quantile(uniform_open(stream()));
      const double noise = lambda.dot(root * z);
      if (noise > margin) ++violations;
    }
    const double freq = static_cast<double>(violations) / n;
    const double half_width = 3.0 * std::sqrt(risk * (1.0 - risk) / n);
    CHECK(std::abs(freq - risk) < half_width);
  }
}

namespace {

Case small_case(int horizon, int n_gen) {
  Case study;
  Network& net = study.network;
  net.horizon = horizon;
  net.buses = {{1, true}, {2, false}};
  net.lines = {{1, 1, 2, 0.1, 200.0, -200.0, true}};
  for (int k = 0; k < n_gen; ++k) {
    net.generators.push_back(
        {k + 1, 1, 0.0, 300.0, -80.0, 80.0, 0.01 * (k + 1), 5.0 + k, 0.0});
  }
  net.wind_farms = {{1, 2, std::vector<double>(horizon, 20.0)}};
  net.loads = {{1, 2, std::vector<double>(horizon, 100.0)}};
  study.uncertainty.covariances = {Eigen::MatrixXd::Identity(1, 1) * 9.0};
  return study;
}

}  // namespace

TEST_CASE("assembled program has the closed-form row and variable counts") {
  SUBCASE("one step, no active views") {
    const Case study = small_case(1, 3);
    const auto sens = build_ptdf(study.network);
    const auto views = constraint_views(study.network);
    RiskBudget budget;
    budget.epsilon = 1e-4;
    budget.line_risks.resize(1);
    const QuadraticProgram qp = assemble_opf(study, sens, views, budget);
    CHECK(qp.num_vars() == 3);
    CHECK(qp.num_rows() == 2 * 3 + 1);  // bounds + balance
  }

  SUBCASE("two steps, one generator: exactly two ramp rows") {
    const Case study = small_case(2, 1);
    const auto sens = build_ptdf(study.network);
    const auto views = constraint_views(study.network);
    RiskBudget budget;
    budget.epsilon = 1e-4;
    budget.line_risks.resize(2);
    const QuadraticProgram qp = assemble_opf(study, sens, views, budget);
    int ramp_rows = 0;
    for (const auto& label : qp.row_labels) {
      if (label.rfind("ramp", 0) == 0) ++ramp_rows;
    }
    CHECK(ramp_rows == 2);
  }

  SUBCASE("row counts on random shapes") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const int horizon = 1 + static_cast<int>(rng() % 5);
      const int ng = 1 + static_cast<int>(rng() % 4);
      const Case study = small_case(horizon, ng);
      const auto sens = build_ptdf(study.network);
      const auto views = constraint_views(study.network);
      const int active = static_cast<int>(rng() % 3);
      RiskBudget budget;
      budget.epsilon = 1e-4;
      budget.line_risks.resize(horizon);
      for (int t = 0; t < horizon; ++t) {
        for (int j = 0; j < active; ++j) {
          budget.line_risks[t].push_back({j + 1, 0.01});
        }
      }
      const QuadraticProgram qp = assemble_opf(study, sens, views, budget);
      CHECK(qp.num_vars() == ng * horizon);
      CHECK(qp.num_rows() == 2 * ng * horizon + 2 * ng * (horizon - 1) +
                                 horizon + active * horizon);
    }
  }
}

TEST_CASE("two-generator single-period dispatch matches the hand KKT solve") {
  // Equal marginal costs at the optimum: 2*q1*g1 + c1 = 2*q2*g2 + c2 with
  // g1 + g2 = D - W + margin and both units interior.
  Case study = small_case(1, 2);
  study.network.generators[0] = {1, 1, 0.0, 300.0, -80.0, 80.0, 0.02, 10.0, 0.0};
  study.network.generators[1] = {2, 1, 0.0, 300.0, -80.0, 80.0, 0.05, 12.0, 0.0};
  study.uncertainty.covariances = {Eigen::MatrixXd::Identity(1, 1) * 4.0};

  const auto sens = build_ptdf(study.network);
  const auto views = constraint_views(study.network);
  RiskBudget budget;
  budget.epsilon = 1e-4;
  budget.line_risks.resize(1);
  const QuadraticProgram qp = assemble_opf(study, sens, views, budget);
  const QpSolution sol = solve(qp);
  REQUIRE(sol.status == QpStatus::kOptimal);

  const double margin = std_normal_quantile(1.0 - 1e-4) * 2.0;
  const double need = 100.0 - 20.0 + margin;
  // Solve 0.04 g1 + 10 = 0.10 g2 + 12 and g1 + g2 = need by hand:
  const double g2 = (0.04 * need - 2.0) / 0.14;
  const double g1 = need - g2;
  CHECK(sol.x[0] == doctest::Approx(g1).epsilon(1e-6));
  CHECK(sol.x[1] == doctest::Approx(g2).epsilon(1e-6));
}

TEST_CASE("empty horizon is rejected") {
  Case study = small_case(1, 1);
  const auto sens = build_ptdf(study.network);
  const auto views = constraint_views(study.network);
  study.network.horizon = 0;
  RiskBudget budget;
  CHECK_THROWS_AS(assemble_opf(study, sens, views, budget), ValidationError);
}
