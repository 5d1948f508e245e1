#pragma once

#include <string>
#include <utility>
#include <vector>

#include "growthlab/measures.hpp"
#include "growthlab/nonlinearity.hpp"

namespace growthlab {

enum class RatioLimitKind { Value, Unit, Zero, Indeterminate };

// Predicted limit of x(t) / F^{-1}(M t).
struct RatioLimit {
  RatioLimitKind kind = RatioLimitKind::Indeterminate;
  double value = 1.0;  // meaningful only for Value

  static RatioLimit unit() { return {RatioLimitKind::Unit, 1.0}; }
  static RatioLimit zero() { return {RatioLimitKind::Zero, 0.0}; }
  static RatioLimit of(double v) { return {RatioLimitKind::Value, v}; }
  static RatioLimit indeterminate() { return {RatioLimitKind::Indeterminate, 1.0}; }
};

struct AsymptoticPrediction {
  LambdaClass lambda;
  double mass = 0.0;
  ExtendedReal first_moment;
  RatioLimit limit;
  std::string rationale;  // dispatch clause that produced the limit
};

enum class TrendVerdict { Holds, Fails, Inconclusive };

// Samples of a scalar condition on a grid x = 10^k together with the verdict
// on its claimed limit (0 or +infinity).
struct ConditionTrend {
  std::string name;
  std::vector<double> grid_log10_x;
  std::vector<double> values;
  bool target_zero = true;
  TrendVerdict verdict = TrendVerdict::Inconclusive;
};

// The three trend conditions used when the kernel moment is infinite and
// lambda = 0: two decay conditions supporting ratio -> 1, one growth
// condition supporting ratio -> 0.
struct ConditionReport {
  ConditionTrend partial_moment_decay;  // (f(x) log x / x) * partial moment at F(x)/M
  ConditionTrend tail_integral_decay;   // (f(x)/x) * T(F(x)/M), claimed -> 0
  ConditionTrend tail_integral_growth;  // same samples, claimed -> infinity
};

// Conservative finite-sample protocol for limits at infinity: the verdict
// Holds only when a monotone suffix spans min_decades decades of x and the
// values move by min_factor toward the claimed limit.
struct TrendProtocol {
  double k_min = 3.0;
  double k_max = 3000.0;
  int points = 18;  // log-spaced in k
  double min_decades = 4.0;
  double min_factor = 10.0;
  double zero_floor = 1e-12;  // values at/below this count as converged to 0
};

// Shared trend assessment used by the condition checks.
TrendVerdict assess_trend(const std::vector<double>& ks, const std::vector<double>& values,
                          bool target_zero, const TrendProtocol& proto);

// Predicted ratio limit from the kernel moments and the growth index lambda:
// finite moment (or delay kernel) gives exp(-lambda * C); infinite moment
// gives 0 for lambda > 0 and falls through to the trend classification for
// lambda = 0.
AsymptoticPrediction predict(const Nonlinearity& n, const MeasureKernel& mu);

// Trend classification in the critical regime (half-line kernel, infinite
// first moment, lambda = 0). Throws WrongRegime outside it.
std::pair<ConditionReport, RatioLimit> classify_infinite_moment(
    const Nonlinearity& n, const MeasureKernel& mu, const TrendProtocol& proto = {});

// For the example nonlinearity family (index theta > 1) with kernels that are
// regularly varying of index -alpha: the ratio tends to 1 for
// alpha > 1 + 2/(1+theta) and to 0 for alpha < 1 + 1/(1+theta).
// Returns (unit_lo, zero_hi).
std::pair<double, double> rv_thresholds(double theta);

// K(x) = integral over v in [1, x] of (f(v)/v) * mu((F(x)/M - F(v)/M, F(x)/M]),
// by nested quadrature: outer Simpson in log v on a `panels`-panel base grid
// with adaptive per-panel refinement (rel 1e-6). panels must be even.
double necessity_functional(const Nonlinearity& n, const MeasureKernel& mu, double x,
                            int panels = 64);

// Decay check for (f(x)/x) * integral of K(u)/f(u)^2 over [1, x]; requires
// x f'(x)/f(x) -> 1, verified on a sample grid before evaluating. The default
// grid stops at 10^100: the integrand needs exp(log f) in the working range,
// and slow log-power decays still need ~2 decades of k for a factor-10 move.
ConditionTrend check_overlap_decay(const Nonlinearity& n, const MeasureKernel& mu,
                                   const TrendProtocol& proto = TrendProtocol{3.0, 100.0, 8, 4.0,
                                                                              10.0, 1e-12});

}  // namespace growthlab
