#include "doctest.h"

#include <cstdio>
#include <random>

#include "jcc/errors.hpp"
#include "jcc/uncertainty.hpp"

using namespace jcc;

TEST_CASE("identity covariance factors to the identity") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  CHECK((factor_covariance(eye) - eye).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("diagonal covariance factors to elementwise square roots") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 4.0, 0.0, 0.0, 9.0;
  const Eigen::MatrixXd f = factor_covariance(sigma);
  CHECK(f(0, 0) == doctest::Approx(2.0));
  CHECK(f(1, 1) == doctest::Approx(3.0));
  CHECK(f(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("random PSD matrices reconstruct within 1e-9") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = gauss(rng);
    const Eigen::MatrixXd sigma = a * a.transpose();
    const Eigen::MatrixXd f = factor_covariance(sigma);
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    CHECK((f * f.transpose() - sigma).cwiseAbs().maxCoeff() / scale < 1e-9);
    // Lower-triangular contract.
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) CHECK(f(r, c) == 0.0);
  }
}

TEST_CASE("rank-deficient but PSD covariance is accepted") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 1.0, 1.0, 1.0;  // rank one
  const Eigen::MatrixXd f = factor_covariance(sigma);
  CHECK((f * f.transpose() - sigma).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("indefinite covariance is rejected") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(factor_covariance(sigma), ModelError);
}

TEST_CASE("asymmetric covariance is rejected") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.5, 0.1, 1.0;
  CHECK_THROWS_AS(factor_covariance(sigma), ModelError);
}

TEST_CASE("zero covariance reproduces the forecast exactly") {
  ErrorModel model;
  model.covariances = {Eigen::MatrixXd::Zero(2, 2)};
  std::vector<Eigen::VectorXd> forecasts(3, Eigen::VectorXd::Zero(2));
  forecasts[0] << 10.0, 20.0;
  forecasts[1] << 11.0, 21.0;
  forecasts[2] << 12.0, 22.0;
  const ScenarioSet set = draw_scenarios(model, forecasts, 50, 99);
  for (int t = 0; t < 3; ++t) {
    for (int s = 0; s < 50; ++s) {
      CHECK(set.draws[t](s, 0) == forecasts[t][0]);
      CHECK(set.draws[t](s, 1) == forecasts[t][1]);
    }
  }
}

TEST_CASE("same seed reproduces draws bit-exactly, different seed does not") {
  ErrorModel model;
  model.covariances = {Eigen::MatrixXd::Identity(2, 2) * 4.0};
  std::vector<Eigen::VectorXd> forecasts(2, Eigen::VectorXd::Constant(2, 30.0));
  const ScenarioSet a = draw_scenarios(model, forecasts, 200, 1234);
  const ScenarioSet b = draw_scenarios(model, forecasts, 200, 1234);
  const ScenarioSet c = draw_scenarios(model, forecasts, 200, 1235);
  for (int t = 0; t < 2; ++t) {
    CHECK(a.draws[t] == b.draws[t]);
    CHECK(a.draws[t] != c.draws[t]);
  }
}

TEST_CASE("unit-variance draws obey law-of-large-numbers bounds") {
  ErrorModel model;
  model.covariances = {Eigen::MatrixXd::Identity(1, 1)};
  std::vector<Eigen::VectorXd> forecasts{Eigen::VectorXd::Constant(1, 100.0)};
  const int n = 1000000;
  const ScenarioSet set = draw_scenarios(model, forecasts, n, 2024);
  const double mean = set.draws[0].col(0).mean();
  const double var =
      (set.draws[0].col(0).array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(mean - 100.0) < 0.005);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("empirical covariance converges to the model covariance") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 9.0, 4.5, 4.5, 16.0;
  ErrorModel model;
  model.covariances = {sigma};
  std::vector<Eigen::VectorXd> forecasts{Eigen::VectorXd::Zero(2)};
  const int n = 20000;
  const ScenarioSet set = draw_scenarios(model, forecasts, n, 31);

  Eigen::RowVectorXd mean = set.draws[0].colwise().mean();
  Eigen::MatrixXd centered = set.draws[0].rowwise() - mean;
  Eigen::MatrixXd emp = centered.transpose() * centered / (n - 1);

  const double bound = 5.0 * std::sqrt(1.0 / n) * sigma.norm();
  CHECK((emp - sigma).norm() < bound);
}

TEST_CASE("per-step covariances are honored") {
  ErrorModel model;
  model.covariances = {Eigen::MatrixXd::Zero(1, 1),
                       Eigen::MatrixXd::Identity(1, 1) * 100.0};
  std::vector<Eigen::VectorXd> forecasts(2, Eigen::VectorXd::Zero(1));
  const ScenarioSet set = draw_scenarios(model, forecasts, 500, 5);
  CHECK(set.draws[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(set.draws[1].cwiseAbs().maxCoeff() > 1.0);
}

TEST_CASE("scenario CSV round trip") {
  ErrorModel model;
  model.covariances = {Eigen::MatrixXd::Identity(2, 2)};
  std::vector<Eigen::VectorXd> forecasts(3, Eigen::VectorXd::Constant(2, 5.0));
  const ScenarioSet set = draw_scenarios(model, forecasts, 20, 77);

  const std::string path = "scenario_roundtrip_test.csv";
  save_scenarios_csv(set, path);
  const ScenarioSet loaded = load_scenarios_csv(path);
  std::remove(path.c_str());

  REQUIRE(loaded.horizon() == set.horizon());
  REQUIRE(loaded.sample_count == set.sample_count);
  for (int t = 0; t < 3; ++t) {
    CHECK((loaded.draws[t] - set.draws[t]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("scenario CSV with an incomplete grid is rejected") {
  const std::string path = "scenario_badgrid_test.csv";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("t,s,w_1\n0,0,1.0\n0,1,2.0\n1,0,3.0\n", f);  // missing (1,1)
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_scenarios_csv(path), ParseError);
  std::remove(path.c_str());
}
