#pragma once

#include <cstddef>
#include <vector>

namespace growthlab {

// Result of fitting r(t) ~ limit + amplitude * t^{-beta} to the tail of a
// series sampled on an increasing time grid.
struct PowerTailFit {
  double limit = 0.0;
  double amplitude = 0.0;
  double beta = 0.0;
  bool ok = false;  // true when the three-point fit was self-consistent
};

// Extrapolates the series to t -> infinity using samples near t_end/4,
// t_end/2 and t_end. Falls back to the final value (ok=false) when the
// increments do not decay geometrically.
PowerTailFit fit_power_tail(const std::vector<double>& t, const std::vector<double>& r);

// Spearman rank correlation of v against its sample order. Returns a value in
// [-1, 1]; 0 for constant input.
double spearman_rho(const std::vector<double>& v);

}  // namespace growthlab
