#include "doctest.h"

#include "jcc/errors.hpp"
#include "jcc/evaluation.hpp"

using namespace jcc;

namespace {

Case corridor_case(double limit, double variance) {
  Case study;
  Network& net = study.network;
  net.horizon = 2;
  net.buses = {{1, true}, {2, false}, {3, false}};
  net.lines = {{1, 1, 3, 0.1, limit, -limit, true},
               {2, 2, 3, 0.1, limit, -limit, true}};
  net.generators = {{1, 1, 0.0, 400.0, -200.0, 200.0, 0.02, 10.0, 0.0},
                    {2, 3, 0.0, 400.0, -200.0, 200.0, 0.05, 30.0, 0.0}};
  net.wind_farms = {{1, 2, {40.0, 45.0}}};
  net.loads = {{1, 3, {200.0, 210.0}}};
  study.uncertainty.covariances = {
      Eigen::MatrixXd::Identity(1, 1) * variance};
  return study;
}

}  // namespace

TEST_CASE("huge limits give a perfect success probability") {
  const Case study = corridor_case(1e6, 49.0);
  FrameworkConfig config;
  const DispatchSchedule schedule = solve_no_jcc(study, config);
  const EvalDetail detail =
      evaluate_pos(schedule.dispatch, study, 20000, 77, config.alpha, 42);
  for (const auto& entry : detail.pos.entries) {
    CHECK(entry.pos == 1.0);
    CHECK(entry.pass);
  }
  CHECK(detail.attribution.empty());
}

TEST_CASE("zero spread with nominal flows inside limits is always a success") {
  const Case study = corridor_case(300.0, 0.0);
  FrameworkConfig config;
  const DispatchSchedule schedule = solve_no_jcc(study, config);
  const EvalDetail detail =
      evaluate_pos(schedule.dispatch, study, 5000, 77, config.alpha, 42);
  for (const auto& entry : detail.pos.entries) CHECK(entry.pos == 1.0);
}

TEST_CASE("a dispatch on one tightened boundary succeeds at 1-risk") {
  // Passthrough line: flow = wind sample. Dispatch plays no role in the flow,
  // so pin the nominal by the forecast and set the limit on the margin.
  const double risk = 0.1;
  const double sigma = 5.0;
  Case study;
  Network& net = study.network;
  net.horizon = 1;
  net.buses = {{1, true}, {2, false}};
  const double limit = 50.0 + std_normal_quantile(1.0 - risk) * sigma;
  net.lines = {{1, 2, 1, 0.1, limit, -1000.0, true}};
  net.generators = {{1, 1, 0.0, 500.0, -500.0, 500.0, 0.01, 1.0, 0.0}};
  net.wind_farms = {{1, 2, {50.0}}};
  net.loads = {{1, 1, {50.0}}};
  study.uncertainty.covariances = {
      Eigen::MatrixXd::Identity(1, 1) * sigma * sigma};

  const std::vector<Eigen::VectorXd> dispatch{Eigen::VectorXd::Zero(1)};
  const int n_eval = 100000;
  const EvalDetail detail =
      evaluate_pos(dispatch, study, n_eval, 913, 0.05, 42);
  const double expect = 1.0 - risk;
  const double half_width = 3.0 * std::sqrt(risk * (1.0 - risk) / n_eval);
  CHECK(std::abs(detail.pos.entries[0].pos - expect) < half_width);
}

TEST_CASE("evaluation refuses to reuse the solve stream") {
  const Case study = corridor_case(100.0, 49.0);
  FrameworkConfig config;
  const DispatchSchedule schedule = solve_no_jcc(study, config);
  CHECK_THROWS_AS(
      evaluate_pos(schedule.dispatch, study, 1000, config.seed, config.alpha,
                   config.seed),
      ValidationError);
}

TEST_CASE("comparison with only the free method has a zero gap") {
  const Case study = corridor_case(100.0, 25.0);
  FrameworkConfig config;
  config.n_samples = 2000;
  const CompareResult result =
      compare_methods(study, config, {MethodId::kNoJcc}, 5000, 1234);
  REQUIRE(result.cost.rows.size() == 1);
  CHECK(result.cost.rows[0].ok);
  CHECK(result.cost.rows[0].gap == doctest::Approx(0.0));
  CHECK(result.all_ok);
}

TEST_CASE("comparison keeps going when one method fails") {
  Case study = corridor_case(60.0, 49.0);
  // Make presolve infeasible but keep the free problem solvable: a line
  // limit the uniform tightening cannot satisfy.
  study.network.lines[0].limit_upper_mw = 16.0;
  study.network.lines[0].limit_lower_mw = -16.0;
  study.network.generators[1].g_max_mw = 400.0;

  FrameworkConfig config;
  config.alpha = 0.01;
  config.n_samples = 1000;

  const CompareResult result = compare_methods(
      study, config, {MethodId::kNoJcc, MethodId::kBoole}, 2000, 99);
  REQUIRE(result.cost.rows.size() == 2);
  CHECK(result.cost.rows[0].ok);
  if (!result.cost.rows[1].ok) {
    CHECK(!result.all_ok);
    CHECK(!result.cost.rows[1].error.empty());
  }
}

TEST_CASE("violation attribution names the failing line and direction") {
  // Leave the nominal flow right at the limit so about half the scenarios
  // violate the upper direction of line 1.
  Case study;
  Network& net = study.network;
  net.horizon = 1;
  net.buses = {{1, true}, {2, false}};
  net.lines = {{1, 2, 1, 0.1, 50.0, -1000.0, true}};
  net.generators = {{1, 1, 0.0, 500.0, -500.0, 500.0, 0.01, 1.0, 0.0}};
  net.wind_farms = {{1, 2, {50.0}}};
  net.loads = {{1, 1, {50.0}}};
  study.uncertainty.covariances = {Eigen::MatrixXd::Identity(1, 1) * 25.0};

  const std::vector<Eigen::VectorXd> dispatch{Eigen::VectorXd::Zero(1)};
  const EvalDetail detail = evaluate_pos(dispatch, study, 20000, 5, 0.05, 42);
  REQUIRE(!detail.attribution.empty());
  const auto& cell = detail.attribution.front();
  CHECK(cell.line_id == 1);
  CHECK(cell.direction == 1);
  CHECK(cell.count > 8000);
  CHECK(cell.count < 12000);
  CHECK(!detail.pos.entries[0].pass);
}
