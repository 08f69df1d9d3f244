#include "jcc/uncertainty.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jcc/errors.hpp"
#include "jcc/normal.hpp"
#include "jcc/rng.hpp"

namespace jcc {

Eigen::MatrixXd factor_covariance(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw ModelError("covariance must be square");
  }
  const int n = static_cast<int>(sigma.rows());
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ModelError("covariance must be symmetric");
  }
  if (sigma.cwiseAbs().maxCoeff() == 0.0) {
    return Eigen::MatrixXd::Zero(n, n);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) {
    return Eigen::MatrixXd(llt.matrixL());
  }

  // Not numerically positive definite: clamp the spectrum, reject genuinely
  // indefinite input, then factor the shifted reconstruction.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw ModelError("covariance eigendecomposition failed");
  }
  const double max_eig = eig.eigenvalues().maxCoeff();
  const double tol = 1e-8 * std::max(1.0, max_eig);
  Eigen::VectorXd clamped = eig.eigenvalues();
  for (int i = 0; i < n; ++i) {
    if (clamped[i] < -tol) {
      throw ModelError("covariance has a negative eigenvalue (" +
                       std::to_string(clamped[i]) + ")");
    }
    clamped[i] = std::max(clamped[i], 0.0);
  }
  Eigen::MatrixXd psd =
      eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  const double shift = 1e-14 * std::max(1.0, max_eig);
  psd.diagonal().array() += shift;
  Eigen::LLT<Eigen::MatrixXd> llt2(psd);
  if (llt2.info() != Eigen::Success) {
    throw ModelError("covariance factorization failed after regularization");
  }
  return Eigen::MatrixXd(llt2.matrixL());
}

ScenarioSet draw_scenarios(const ErrorModel& model,
                           const std::vector<Eigen::VectorXd>& forecasts,
                           int sample_count, std::uint64_t seed) {
  if (sample_count < 1) {
    throw ModelError("sample count must be >= 1");
  }
  const int horizon = static_cast<int>(forecasts.size());
  if (horizon == 0) throw ModelError("empty forecast horizon");
  if (!model.shared() && static_cast<int>(model.covariances.size()) != horizon) {
    throw ModelError("per-step covariance list does not match horizon");
  }

  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(model.covariances.size());
  for (const auto& sigma : model.covariances) {
    factors.push_back(factor_covariance(sigma));
  }

  ScenarioSet set;
  set.sample_count = sample_count;
  set.seed = seed;
  set.draws.resize(horizon);

  const int nw = model.dimension();
  for (int t = 0; t < horizon; ++t) {
    if (forecasts[t].size() != nw) {
      throw ModelError("forecast dimension does not match covariance at t=" +
                       std::to_string(t));
    }
    const Eigen::MatrixXd& factor = model.shared() ? factors[0] : factors[t];
    auto stream = make_stream(seed, static_cast<std::uint64_t>(t));
    Eigen::MatrixXd block(sample_count, nw);
    Eigen::VectorXd z(nw);
    for (int s = 0; s < sample_count; ++s) {
      for (int k = 0; k < nw; ++k) {
        z[k] = std_normal_quantile(uniform_open(stream()));
      }
      block.row(s) = (forecasts[t] + factor * z).transpose();
    }
    set.draws[t] = std::move(block);
  }
  return set;
}

ScenarioSet load_scenarios_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError({path + ": cannot open scenario file"});

  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError({path + ": empty scenario file"});
  }
  std::stringstream hs(header);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(hs, field, ',')) fields.push_back(field);
  if (fields.size() < 3 || fields[0] != "t" || fields[1] != "s") {
    throw ParseError({path + ": header must be t,s,w_1,...,w_Nw"});
  }
  const int nw = static_cast<int>(fields.size()) - 2;

  struct Row {
    int t, s;
    std::vector<double> w;
  };
  std::vector<Row> rows;
  std::string line;
  int line_no = 1;
  int max_t = -1, max_s = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ls(line);
    Row row;
    char comma;
    if (!(ls >> row.t >> comma >> row.s)) {
      throw ParseError({path + ":" + std::to_string(line_no) + ": bad row"});
    }
    row.w.resize(nw);
    for (int k = 0; k < nw; ++k) {
      if (!(ls >> comma >> row.w[k])) {
        throw ParseError(
            {path + ":" + std::to_string(line_no) + ": expected " +
             std::to_string(nw) + " wind columns"});
      }
    }
    max_t = std::max(max_t, row.t);
    max_s = std::max(max_s, row.s);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError({path + ": no scenario rows"});

  const int horizon = max_t + 1;
  const int count = max_s + 1;
  if (static_cast<long>(rows.size()) != static_cast<long>(horizon) * count) {
    throw ParseError({path + ": incomplete (t,s) grid: " +
                      std::to_string(rows.size()) + " rows for " +
                      std::to_string(horizon) + "x" + std::to_string(count)});
  }

  ScenarioSet set;
  set.sample_count = count;
  set.seed = 0;
  set.draws.assign(horizon, Eigen::MatrixXd::Zero(count, nw));
  std::vector<char> filled(static_cast<std::size_t>(horizon) * count, 0);
  for (const auto& row : rows) {
    if (row.t < 0 || row.s < 0) throw ParseError({path + ": negative t or s"});
    auto& cell = filled[static_cast<std::size_t>(row.t) * count + row.s];
    if (cell) throw ParseError({path + ": duplicate (t,s) pair"});
    cell = 1;
    for (int k = 0; k < nw; ++k) set.draws[row.t](row.s, k) = row.w[k];
  }
  return set;
}

void save_scenarios_csv(const ScenarioSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError({path + ": cannot open for writing"});
  const int nw = set.draws.empty() ? 0 : static_cast<int>(set.draws[0].cols());
  out << "t,s";
  for (int k = 1; k <= nw; ++k) out << ",w_" << k;
  out << "\n";
  char buf[64];
  for (int t = 0; t < set.horizon(); ++t) {
    for (int s = 0; s < set.sample_count; ++s) {
      out << t << "," << s;
      for (int k = 0; k < nw; ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", set.draws[t](s, k));
        out << "," << buf;
      }
      out << "\n";
    }
  }
}

}  // namespace jcc
