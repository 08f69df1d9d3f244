#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcc {

// Structural problems in input data (bad references, bounds out of order, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Network graph problems: disconnected system, singular susceptance matrix.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Statistical model problems: indefinite covariance and the like.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decomposition pipeline failures (e.g. an over-constrained presolve).
class FrameworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Case-file parsing. Carries every issue found, not just the first.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "\n";
      out += s;
    }
    return out.empty() ? std::string("unspecified parse error") : out;
  }

  std::vector<std::string> issues_;
};

}  // namespace jcc
