#pragma once
#include <functional>

namespace growthlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;     // accumulated local error estimates
  bool converged = true;  // false if the depth limit was hit anywhere
};

// Adaptive Gauss-Kronrod (7,15) integration on a finite interval.
// Subintervals are bisected until |K15 - G7| falls below the local share of
// max(abs_floor, rel_tol * |I|), where I is the running whole-interval estimate.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-10, double abs_floor = 1e-14,
                              int max_depth = 48);

// Composite Simpson rule with a fixed (even) panel count.
double integrate_simpson(const std::function<double(double)>& f, double a, double b, int panels);

}  // namespace growthlab
