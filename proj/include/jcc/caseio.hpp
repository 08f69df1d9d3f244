#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "jcc/case.hpp"
#include "jcc/decomposition.hpp"

namespace jcc {

// Reads and fully validates a case document. All problems are reported at
// once through ParseError::issues(), each naming the offending field.
Case parse_case(const std::string& path);
Case parse_case_json(const nlohmann::json& doc, const std::string& origin);

nlohmann::json serialize_case(const Case& study);
void save_case(const Case& study, const std::string& path);

// Run parameters for the command-line workflows. Defaults follow the
// standard study setup; file values override defaults, flags override both.
struct RunConfig {
  double alpha = 0.05;
  double epsilon = 1e-4;
  int n_samples = 20000;
  int n_eval = 100000;
  std::uint64_t seed = 42;
  std::uint64_t eval_seed = 10007;
  double tolerance = 1e-5;
  int max_iter = 50;
  std::vector<std::string> methods;  // empty = all
  std::string out_dir = "out";

  FrameworkConfig framework() const {
    FrameworkConfig cfg;
    cfg.alpha = alpha;
    cfg.epsilon = epsilon;
    cfg.n_samples = n_samples;
    cfg.seed = seed;
    cfg.tolerance = tolerance;
    cfg.max_iterations = max_iter;
    return cfg;
  }
};

RunConfig load_run_config(const std::string& path);
// Domain checks shared by every command; throws ValidationError.
void check_run_config(const RunConfig& config);

}  // namespace jcc
