#pragma once

namespace jcc {

// Standard normal CDF, Phi(z), via erfc.
double std_normal_cdf(double z);

// Standard normal density.
double std_normal_pdf(double z);

// Inverse CDF. Rational approximation (Wichura's percentage-point algorithm)
// polished with one Newton step; absolute CDF error below 1e-10 across (0,1).
// Throws std::domain_error for p outside the open unit interval.
double std_normal_quantile(double p);

}  // namespace jcc
