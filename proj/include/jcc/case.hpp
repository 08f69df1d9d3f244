#pragma once

#include "jcc/grid.hpp"
#include "jcc/uncertainty.hpp"

namespace jcc {

// Everything the solvers need about one study: the static grid plus the
// forecast-error model. Immutable after construction.
struct Case {
  Network network;
  ErrorModel uncertainty;
};

}  // namespace jcc
