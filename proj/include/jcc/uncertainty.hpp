#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jcc {

// Zero-mean Gaussian forecast-error model. Either one covariance shared by
// all time steps or one matrix per step.
struct ErrorModel {
  std::vector<Eigen::MatrixXd> covariances;  // size 1 (shared) or horizon

  bool shared() const { return covariances.size() == 1; }
  const Eigen::MatrixXd& sigma_at(int t) const {
    return shared() ? covariances.front() : covariances.at(t);
  }
  int dimension() const {
    return covariances.empty() ? 0 : static_cast<int>(covariances.front().rows());
  }
};

// Lower-triangular F with F*F^T = sigma. Semidefinite inputs are handled by
// eigenvalue clamping plus a tiny diagonal shift before the final Cholesky;
// a negative eigenvalue beyond tolerance raises ModelError.
Eigen::MatrixXd factor_covariance(const Eigen::MatrixXd& sigma);

// Wind-power samples w = forecast + error, fixed once per run.
struct ScenarioSet {
  int sample_count = 0;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> draws;  // per t: sample_count x N_w, in MW

  int horizon() const { return static_cast<int>(draws.size()); }
};

// Deterministic per (model, forecasts, count, seed). Samples are drawn
// sample-major within each time step's independent stream (see rng.hpp), with
// normals produced by inverse-CDF so the stream is platform-portable.
ScenarioSet draw_scenarios(const ErrorModel& model,
                           const std::vector<Eigen::VectorXd>& forecasts,
                           int sample_count, std::uint64_t seed);

// Empirical alternative to drawing: CSV with header t,s,w_1,...,w_Nw and one
// row per (time step, sample). The (t, s) grid must be complete.
ScenarioSet load_scenarios_csv(const std::string& path);
void save_scenarios_csv(const ScenarioSet& set, const std::string& path);

}  // namespace jcc
