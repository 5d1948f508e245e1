#include "growthlab/asymptotics.hpp"

#include <cmath>

#include "growthlab/errors.hpp"
#include "growthlab/quadrature.hpp"

namespace growthlab {
namespace {

constexpr double kLn10 = 2.302585092994045684;

std::vector<double> log_spaced(double lo, double hi, int points) {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    out[i] = lo * std::pow(hi / lo, points > 1 ? static_cast<double>(i) / (points - 1) : 0.0);
  }
  return out;
}

// Longest suffix monotone in the given direction; returns the start index.
std::size_t monotone_suffix(const std::vector<double>& v, bool increasing) {
  std::size_t start = v.size() - 1;
  while (start > 0) {
    const bool ok = increasing ? v[start] >= v[start - 1] : v[start] <= v[start - 1];
    if (!ok) break;
    --start;
  }
  return start;
}

bool decisive(const std::vector<double>& ks, const std::vector<double>& v, bool increasing,
              const TrendProtocol& proto) {
  const std::size_t s = monotone_suffix(v, increasing);
  const std::size_t e = v.size() - 1;
  if (ks[e] - ks[s] < proto.min_decades) return false;
  const double from = v[s];
  const double to = v[e];
  if (increasing) return from > 0.0 ? to / from >= proto.min_factor : to > 0.0;
  return to > 0.0 ? from / to >= proto.min_factor : from > 0.0;
}

// Recursive Simpson refinement with Richardson extrapolation; tol is the
// absolute error budget for [a, b].
template <typename F>
double refine_simpson(const F& g, double a, double b, double ga, double gm, double gb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double glm = g(lm);
  const double grm = g(rm);
  const double left = (m - a) * (ga + 4.0 * glm + gm) / 6.0;
  const double right = (b - m) * (gm + 4.0 * grm + gb) / 6.0;
  const double finer = left + right;
  if (depth <= 0 || std::abs(finer - whole) <= 15.0 * tol) {
    return finer + (finer - whole) / 15.0;
  }
  return refine_simpson(g, a, m, ga, glm, gm, left, 0.5 * tol, depth - 1) +
         refine_simpson(g, m, b, gm, grm, gb, right, 0.5 * tol, depth - 1);
}

}  // namespace

TrendVerdict assess_trend(const std::vector<double>& ks, const std::vector<double>& values,
                          bool target_zero, const TrendProtocol& proto) {
  if (ks.size() != values.size() || values.size() < 4) {
    throw ValidationError("assess_trend needs matching grids with >= 4 samples");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("assess_trend requires finite non-negative samples");
    }
  }
  if (target_zero && values.back() <= proto.zero_floor) return TrendVerdict::Holds;
  const bool toward = !target_zero;  // increasing samples move toward +infinity
  if (decisive(ks, values, toward, proto)) return TrendVerdict::Holds;
  if (decisive(ks, values, !toward, proto)) return TrendVerdict::Fails;
  return TrendVerdict::Inconclusive;
}

AsymptoticPrediction predict(const Nonlinearity& n, const MeasureKernel& mu) {
  AsymptoticPrediction out;
  out.lambda = n.effective_lambda();
  out.mass = mu.total_mass();
  out.first_moment = mu.first_moment();

  if (mu.support() == SupportKind::DelayInterval || out.first_moment.is_finite()) {
    out.rationale = "finite-moment-limit";
    const double C = out.first_moment.value;  // finite here by construction
    switch (out.lambda.kind) {
      case LambdaKind::Zero:
        out.limit = RatioLimit::unit();
        break;
      case LambdaKind::Infinite:
        out.limit = C > 0.0 ? RatioLimit::zero() : RatioLimit::unit();
        break;
      case LambdaKind::Finite: {
        const double v = std::exp(-out.lambda.value * C);
        out.limit = v == 1.0 ? RatioLimit::unit() : RatioLimit::of(v);
        break;
      }
    }
    return out;
  }

  // Half-line kernel with infinite first moment.
  if (!out.lambda.is_zero()) {
    out.rationale = "infinite-moment-zero-limit";
    out.limit = RatioLimit::zero();
    return out;
  }
  const auto [report, limit] = classify_infinite_moment(n, mu);
  out.limit = limit;
  switch (limit.kind) {
    case RatioLimitKind::Unit:
      out.rationale = "critical-trend-unit";
      break;
    case RatioLimitKind::Zero:
      out.rationale = "critical-trend-zero";
      break;
    default:
      out.rationale = "unclassified";
      break;
  }
  return out;
}

std::pair<ConditionReport, RatioLimit> classify_infinite_moment(const Nonlinearity& n,
                                                                const MeasureKernel& mu,
                                                                const TrendProtocol& proto) {
  if (mu.support() != SupportKind::HalfLine) {
    throw WrongRegime("classification requires a half-line kernel");
  }
  if (mu.first_moment().is_finite()) {
    throw WrongRegime("classification requires an infinite first moment");
  }
  if (!n.effective_lambda().is_zero()) {
    throw WrongRegime("classification requires lambda = 0");
  }
  const double M = mu.total_mass();
  const auto& lf = n.log_f();
  const std::vector<double> ks = log_spaced(proto.k_min, proto.k_max, proto.points);

  ConditionReport report;
  report.partial_moment_decay.name = "partial-moment-decay";
  report.tail_integral_decay.name = "tail-integral-decay";
  report.tail_integral_growth.name = "tail-integral-growth";
  report.tail_integral_growth.target_zero = false;

  for (double k : ks) {
    const double w = k * kLn10;  // log x
    const double t_arg = n.transform_log(w) / M;
    const double pm = mu.partial_moment(t_arg);
    // T(t) = partial moment + t * tail mass (the tail-integral identity).
    const double big_t = pm + t_arg * mu.tail_mass(t_arg);
    const double slow = std::exp(lf(w) - w);  // f(x)/x
    report.partial_moment_decay.grid_log10_x.push_back(k);
    report.partial_moment_decay.values.push_back(slow * w * pm);
    report.tail_integral_decay.grid_log10_x.push_back(k);
    report.tail_integral_decay.values.push_back(slow * big_t);
    report.tail_integral_growth.grid_log10_x.push_back(k);
    report.tail_integral_growth.values.push_back(slow * big_t);
  }

  auto finish = [&](ConditionTrend& c) {
    c.verdict = assess_trend(c.grid_log10_x, c.values, c.target_zero, proto);
  };
  finish(report.partial_moment_decay);
  finish(report.tail_integral_decay);
  finish(report.tail_integral_growth);

  RatioLimit limit = RatioLimit::indeterminate();
  if (report.partial_moment_decay.verdict == TrendVerdict::Holds &&
      report.tail_integral_decay.verdict == TrendVerdict::Holds) {
    limit = RatioLimit::unit();
  } else if (report.tail_integral_growth.verdict == TrendVerdict::Holds) {
    limit = RatioLimit::zero();
  }
  return {report, limit};
}

std::pair<double, double> rv_thresholds(double theta) {
  if (!(theta > 1.0) || !std::isfinite(theta)) {
    throw BadTheta("rv_thresholds requires theta > 1");
  }
  return {1.0 + 2.0 / (1.0 + theta), 1.0 + 1.0 / (1.0 + theta)};
}

double necessity_functional(const Nonlinearity& n, const MeasureKernel& mu, double x,
                            int panels) {
  if (mu.support() != SupportKind::HalfLine) {
    throw WrongSupport("necessity_functional requires a half-line kernel");
  }
  if (!(x >= 1.0)) throw DomainError("necessity_functional requires x >= 1");
  if (panels < 2 || panels % 2 != 0) {
    throw ValidationError("necessity_functional panels must be even and >= 2");
  }
  if (x == 1.0) return 0.0;
  const double M = mu.total_mass();
  const double logx = std::log(x);
  const double t_hi = n.transform_log(logx) / M;
  const auto& lf = n.log_f();
  // integral over s = log v in [0, log x] of f(v) * mu-window(s) ds; the
  // window is half-open on the left so a point mass is picked up only once
  // F(v) strictly passes F(x) - M * location.
  auto integrand = [&](double s) {
    const double lo = std::max(0.0, t_hi - n.transform_log(s) / M);
    return std::exp(lf(s)) * mu.window_mass_open_left(lo, t_hi);
  };
  // Composite Simpson on the uniform base grid, then adaptive refinement of
  // each base panel: the integrand develops a layer of width ~1/log(x) at the
  // right endpoint (the window boundary sweeps past the kernel support there),
  // which a fixed grid cannot resolve uniformly in x.
  const double delta = logx / panels;
  std::vector<double> node(panels + 1);
  for (int i = 0; i <= panels; ++i) node[i] = integrand(i * delta);
  const int base = panels / 2;
  std::vector<double> piece(base);
  double coarse = 0.0;
  for (int j = 0; j < base; ++j) {
    piece[j] = delta * (node[2 * j] + 4.0 * node[2 * j + 1] + node[2 * j + 2]) / 3.0;
    coarse += piece[j];
  }
  const double budget = std::max(1e-14, 1e-6 * std::abs(coarse)) / base;
  double total = 0.0;
  for (int j = 0; j < base; ++j) {
    total += refine_simpson(integrand, 2 * j * delta, (2 * j + 2) * delta, node[2 * j],
                            node[2 * j + 1], node[2 * j + 2], piece[j], budget, 24);
  }
  return total;
}

ConditionTrend check_overlap_decay(const Nonlinearity& n, const MeasureKernel& mu,
                                   const TrendProtocol& proto) {
  if (mu.support() != SupportKind::HalfLine) {
    throw WrongSupport("check_overlap_decay requires a half-line kernel");
  }
  // Gate: x f'(x)/f(x) must approach 1 (f regularly varying of index 1).
  double dev_first = 0.0, dev_last = 0.0;
  for (int k = 4; k <= 12; k += 8) {
    const double x = std::pow(10.0, k);
    const double dev = std::abs(x * n.f_prime()(x) / n.f()(x) - 1.0);
    (k == 4 ? dev_first : dev_last) = dev;
  }
  if (!(dev_last <= 0.2) || !(dev_last <= dev_first + 1e-12)) {
    throw WrongRegime("check_overlap_decay requires x f'(x)/f(x) -> 1");
  }

  const auto& lf = n.log_f();
  ConditionTrend trend;
  trend.name = "kernel-overlap-decay";
  trend.target_zero = true;
  for (double k : log_spaced(proto.k_min, proto.k_max, proto.points)) {
    const double w = k * kLn10;
    const double x = std::pow(10.0, k);
    // inner integral over s = log u in [0, log x] of K(e^s) e^{s - 2 lf(s)} ds
    auto inner = [&](double s) {
      return necessity_functional(n, mu, std::exp(s)) * std::exp(s - 2.0 * lf(s));
    };
    const int panels = 64;
    const double delta = w / panels;
    double sum = inner(0.0) + inner(w);
    for (int i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * inner(i * delta);
    const double integral = sum * delta / 3.0;
    trend.grid_log10_x.push_back(k);
    trend.values.push_back(std::exp(lf(w) - w) * integral);
  }
  trend.verdict = assess_trend(trend.grid_log10_x, trend.values, true, proto);
  return trend;
}

}  // namespace growthlab
