#include "growthlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/expr.hpp"
#include "growthlab/quadrature.hpp"

namespace growthlab {
namespace {

constexpr double kLn10 = 2.302585092994045684;
// Cached transform checkpoints cover log x in [kTableLo, kTableHi]; evaluation
// outside the table falls back to direct (uncached) segment integration.
constexpr double kTableLo = -8.0;
constexpr double kTableHi = 7040.0;
// Stop extending the cumulative table once F passes this cap; transforms past
// it raise OverflowGuard rather than returning inf.
constexpr double kTableValueCap = 1e250;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0;
};

// Least squares y ~ intercept + slope * x.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y, std::size_t from,
                     std::size_t to) {
  LinearFit out;
  const std::size_t n = to - from;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  out.intercept = my - out.slope * mx;
  for (std::size_t i = from; i < to; ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    out.sse += r * r;
  }
  return out;
}

}  // namespace

Nonlinearity::Nonlinearity(NonlinearitySpec spec) : spec_(std::move(spec)) {
  if (!spec_.f || !spec_.f_prime || !spec_.log_f) {
    throw ValidationError("nonlinearity requires f, f_prime and log_f evaluators");
  }

  // Positivity and log-domain consistency on a log grid.
  for (int i = 0; i <= 56; ++i) {
    const double x = std::pow(10.0, -2.0 + 14.0 * i / 56.0);
    const double fx = spec_.f(x);
    if (!std::isfinite(fx) || fx <= 0.0) {
      throw ValidationError("f must be positive and finite on [1e-2, 1e12] (fails at x=" +
                            format_double(x) + ")");
    }
    if (i % 4 == 0) {
      const double lf = spec_.log_f(std::log(x));
      if (!std::isfinite(lf) || std::abs(std::exp(lf) / fx - 1.0) > 1e-10) {
        throw ValidationError("log_f(log x) is inconsistent with log(f(x)) at x=" +
                              format_double(x));
      }
    }
  }

  // Monotonicity beyond monotone_from and eventual decay of f'.
  const double x_ref = std::max(1.0, 2.0 * spec_.monotone_from);
  double first_decade_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 8; ++i) {
    const double x = x_ref * std::pow(10.0, i / 8.0);
    const double d = spec_.f_prime(x);
    if (!std::isfinite(d) || d <= 0.0) {
      throw ValidationError("f' must be positive beyond monotone_from (fails at x=" +
                            format_double(x) + ")");
    }
    first_decade_min = std::min(first_decade_min, d);
  }
  double last_decade_max = 0.0;
  for (int i = 0; i <= 8; ++i) {
    const double x = 1e11 * std::pow(10.0, i / 8.0);
    const double d = spec_.f_prime(x);
    if (!std::isfinite(d) || d <= 0.0) {
      throw ValidationError("f' must be positive along the sampling grid");
    }
    last_decade_max = std::max(last_decade_max, d);
  }
  if (x_ref < 1e10 && !(last_decade_max < first_decade_min)) {
    throw ValidationError("f' must decay: max over [1e11,1e12] is not below min over the first "
                          "decade past monotone_from");
  }

  // Cumulative transform table, accumulated outward from w = 0 so F(1) == 0
  // exactly. The upward sweep stops early once F(e^w) approaches the top of
  // double range (e.g. F grows like sqrt(x) for f = sqrt): values beyond the
  // stored top raise OverflowGuard instead of silently producing inf.
  w_lo_ = kTableLo;
  w_hi_ = kTableHi;
  std::size_t n = static_cast<std::size_t>(w_hi_ - w_lo_) + 1;
  table_.assign(n, 0.0);
  const std::size_t i0 = static_cast<std::size_t>(-w_lo_);
  for (std::size_t i = i0 + 1; i < n; ++i) {
    const double w2 = w_lo_ + i;
    if (w2 - spec_.log_f(w2) > 690.0 || table_[i - 1] > kTableValueCap) {
      w_hi_ = w_lo_ + (i - 1);
      table_.resize(i);
      n = i;
      break;
    }
    table_[i] = table_[i - 1] + segment_integral(w_lo_ + (i - 1), w2);
  }
  for (std::size_t i = i0; i-- > 0;) {
    table_[i] = table_[i + 1] - segment_integral(w_lo_ + i, w_lo_ + (i + 1));
  }
}

double Nonlinearity::segment_integral(double wa, double wb) const {
  if (wa == wb) return 0.0;
  auto g = [this](double v) { return std::exp(v - spec_.log_f(v)); };
  return integrate_adaptive(g, wa, wb, 1e-12, 1e-16, 40).value;
}

double Nonlinearity::cached_value(double w) const {
  if (w >= w_lo_ && w <= w_hi_) {
    std::size_t i = static_cast<std::size_t>(std::floor(w - w_lo_));
    if (i >= table_.size() - 1) i = table_.size() - 2;
    return table_[i] + segment_integral(w_lo_ + i, w);
  }
  if (w > w_hi_) {
    double acc = table_.back();
    double cur = w_hi_;
    while (cur + 1.0 < w) {
      if (acc > kTableValueCap || (cur + 1.0) - spec_.log_f(cur + 1.0) > 690.0) {
        throw OverflowGuard("transform value exceeds double range near log x = " +
                            format_double(cur));
      }
      acc += segment_integral(cur, cur + 1.0);
      cur += 1.0;
    }
    if (acc > kTableValueCap || w - spec_.log_f(w) > 690.0) {
      throw OverflowGuard("transform value exceeds double range near log x = " +
                          format_double(cur));
    }
    return acc + segment_integral(cur, w);
  }
  return table_.front() - segment_integral(w, w_lo_);
}

double Nonlinearity::transform_log(double w) const {
  if (std::isnan(w)) throw DomainError("transform_log: w is NaN");
  return cached_value(w);
}

double Nonlinearity::transform(double x) const {
  if (!(x > 0.0)) throw DomainError("transform requires x > 0");
  return cached_value(std::log(x));
}

double Nonlinearity::inverse_transform_log(double y) const {
  if (std::isnan(y)) throw DomainError("inverse_transform_log: y is NaN");
  if (y == 0.0) return 0.0;
  if (y < table_.front()) {
    throw DomainError("inverse_transform_log: y below the representable range of F");
  }
  double lo_w, hi_w, lo_F, hi_F;
  if (y <= table_.back()) {
    const auto it = std::upper_bound(table_.begin(), table_.end(), y);
    std::size_t j = static_cast<std::size_t>(it - table_.begin());
    if (j == 0) j = 1;
    if (j >= table_.size()) j = table_.size() - 1;
    lo_w = w_lo_ + (j - 1);
    hi_w = w_lo_ + j;
    lo_F = table_[j - 1];
    hi_F = table_[j];
  } else {
    double cur_w = w_hi_;
    double cur_F = table_.back();
    double dw = 1.0;
    if (spec_.approx_log_inverse) {
      const double hint = spec_.approx_log_inverse(y);
      if (std::isfinite(hint) && hint > cur_w + 1.0) dw = hint - cur_w;
    }
    for (;;) {
      const double inc = segment_integral(cur_w, cur_w + dw);
      if (cur_F + inc >= y) {
        lo_w = cur_w;
        hi_w = cur_w + dw;
        lo_F = cur_F;
        hi_F = cur_F + inc;
        break;
      }
      cur_w += dw;
      cur_F += inc;
      dw = std::min(dw * 2.0, 64.0);
      if (cur_w > 1e7) throw DomainError("inverse_transform_log: bracket search exhausted");
    }
  }

  const double tol = 1e-9 * std::max(1.0, std::abs(y));
  double w = lo_w + (hi_w - lo_w) *
                        std::clamp((y - lo_F) / std::max(hi_F - lo_F, 1e-300), 0.0, 1.0);
  if (!(w > lo_w && w < hi_w)) w = 0.5 * (lo_w + hi_w);
  for (int iter = 0; iter < 100; ++iter) {
    const double Fw = lo_F + segment_integral(lo_w, w);
    const double resid = Fw - y;
    if (std::abs(resid) <= tol) return w;
    if (resid > 0.0) {
      hi_w = w;
    } else {
      lo_w = w;
      lo_F = Fw;
    }
    if (hi_w - lo_w < 1e-15 * std::max(1.0, std::abs(w))) return w;
    const double slope = std::exp(w - spec_.log_f(w));  // dF/dw at w
    double next = w - resid / std::max(slope, 1e-300);
    if (!(next > lo_w && next < hi_w)) next = 0.5 * (lo_w + hi_w);
    w = next;
  }
  return w;
}

LambdaClass Nonlinearity::estimate_lambda(const LambdaClassifierOptions& opt) const {
  const int n = opt.k_hi - opt.k_lo + 1;
  if (n < 6) throw DomainError("lambda estimation needs at least 6 grid decades");
  std::vector<double> ks(n), inv_k(n), log_k(n), qs(n);
  for (int i = 0; i < n; ++i) {
    const double k = opt.k_lo + i;
    const double w = k * kLn10;
    ks[i] = k;
    inv_k[i] = 1.0 / k;
    log_k[i] = std::log(k);
    qs[i] = std::exp(spec_.log_f(w) + std::log(w) - w);  // f(x) / (x / log x)
    if (!std::isfinite(qs[i]) || qs[i] <= 0.0) {
      throw ValidationError("lambda sampling produced a non-positive value");
    }
  }

  const std::size_t tail_from = static_cast<std::size_t>(n - std::min(n, 5));
  double tail_scale = 1.0;
  for (std::size_t i = tail_from; i < qs.size(); ++i) tail_scale = std::max(tail_scale, qs[i]);
  const double flat_tol = 1e-9 * tail_scale;
  bool up = false, down = false;
  for (std::size_t i = tail_from + 1; i < qs.size(); ++i) {
    const double d = qs[i] - qs[i - 1];
    if (d > flat_tol) up = true;
    else if (d < -flat_tol) down = true;
  }
  if (up && down) {
    throw NonMonotoneTail("f(x) log(x)/x oscillates over the last sampled decades");
  }

  // Model A: q = lambda + a/k (convergent with a 1/log x correction).
  const double lam_tail = fit_linear(inv_k, qs, tail_from, qs.size()).intercept;
  LambdaClass result;
  if (!up) {
    if (qs.back() < opt.zero_threshold || lam_tail <= opt.zero_threshold) {
      result = LambdaClass::zero();
    } else {
      result = LambdaClass::finite(lam_tail);
    }
  } else if (qs.back() > opt.infinite_threshold) {
    result = LambdaClass::infinite();
  } else {
    // Model competition: convergent (A over all samples) against power growth
    // (B: log q = log c + p log k), SSE compared in value space.
    const LinearFit all_A = fit_linear(inv_k, qs, 0, qs.size());
    std::vector<double> log_q(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) log_q[i] = std::log(qs[i]);
    const LinearFit fit_B = fit_linear(log_k, log_q, 0, qs.size());
    double sse_B = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double r = std::exp(fit_B.intercept + fit_B.slope * log_k[i]) - qs[i];
      sse_B += r * r;
    }
    if (fit_B.slope >= 0.05 && sse_B < all_A.sse) {
      result = LambdaClass::infinite();
    } else {
      result = LambdaClass::finite(lam_tail);
    }
  }

  if (spec_.declared_lambda) {
    const LambdaClass& d = *spec_.declared_lambda;
    bool ok = d.kind == result.kind;
    if (ok && d.kind == LambdaKind::Finite) {
      ok = std::abs(result.value - d.value) <= std::max(0.05, 0.25 * std::abs(d.value));
    }
    if (!ok) {
      throw LambdaMismatch("sampled lambda class disagrees with the declared one for " +
                           spec_.name);
    }
  }
  return result;
}

LambdaClass Nonlinearity::effective_lambda() const {
  if (spec_.declared_lambda) return *spec_.declared_lambda;
  return estimate_lambda();
}

RvhwVerdict Nonlinearity::check_rvhw() const {
  std::vector<double> hs;
  for (int k = 2; k <= 12; ++k) {
    const double w = k * kLn10;
    hs.push_back(std::exp(spec_.log_f(w) - w) * transform_log(w));  // f(x) F(x) / x
  }
  const std::size_t tail_from = hs.size() - 5;
  double tail_scale = 1.0;
  for (std::size_t i = tail_from; i < hs.size(); ++i) {
    tail_scale = std::max(tail_scale, std::abs(hs[i]));
  }
  const double flat_tol = 1e-9 * tail_scale;
  bool up = false, down = false;
  for (std::size_t i = tail_from + 1; i < hs.size(); ++i) {
    const double d = hs[i] - hs[i - 1];
    if (d > flat_tol) up = true;
    else if (d < -flat_tol) down = true;
  }
  if (up && down) throw InconclusiveTrend("f F / x trend is non-monotone over the sampled tail");
  if (!up) return RvhwVerdict::Bounded;
  if (hs.back() > 1e3) return RvhwVerdict::Unbounded;
  // Increasing but moderate: decide by whether the per-decade increments decay
  // geometrically (convergent) or persist (divergent).
  const double d_last = hs[hs.size() - 1] - hs[hs.size() - 2];
  const double d_prev = hs[hs.size() - 2] - hs[hs.size() - 3];
  if (d_prev <= flat_tol) return RvhwVerdict::Bounded;
  return d_last / d_prev <= 0.7 ? RvhwVerdict::Bounded : RvhwVerdict::Unbounded;
}

Nonlinearity make_example_family(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw BadTheta("example family requires theta > 0");
  }
  const double b = std::exp(theta + 1.0);  // shift of the log argument
  const double a = b - 1.0;                // shift of the numerator
  NonlinearitySpec spec;
  spec.name = "example(" + format_double(theta) + ")";
  spec.f = [a, b, theta](double x) {
    return (x + a) / std::pow(std::log(x + b), theta);
  };
  spec.f_prime = [a, b, theta](double x) {
    const double L = std::log(x + b);
    return (1.0 - theta * (x + a) / ((x + b) * L)) / std::pow(L, theta);
  };
  spec.log_f = [a, b, theta](double w) {
    if (w <= 50.0) {
      const double x = std::exp(w);
      return std::log(x + a) - theta * std::log(std::log(x + b));
    }
    const double e = std::exp(-w);
    return w + std::log1p(a * e) - theta * std::log(w + std::log1p(b * e));
  };
  if (theta > 1.0) {
    spec.declared_lambda = LambdaClass::zero();
  } else if (theta == 1.0) {
    spec.declared_lambda = LambdaClass::finite(1.0);
  } else {
    spec.declared_lambda = LambdaClass::infinite();
  }
  spec.monotone_from = 0.0;
  spec.concave_from = 0.0;
  spec.approx_log_inverse = [theta](double y) {
    return std::pow((theta + 1.0) * std::max(y, 0.0), 1.0 / (theta + 1.0));
  };
  return Nonlinearity(std::move(spec));
}

Nonlinearity make_sqrt() {
  NonlinearitySpec spec;
  spec.name = "sqrt";
  spec.f = [](double x) { return std::sqrt(x); };
  spec.f_prime = [](double x) { return 0.5 / std::sqrt(x); };
  spec.log_f = [](double w) { return 0.5 * w; };
  spec.declared_lambda = LambdaClass::zero();
  spec.monotone_from = 0.0;
  spec.concave_from = 0.0;
  // F(x) = 2(sqrt(x) - 1), so F^{-1}(y) = (1 + y/2)^2.
  spec.approx_log_inverse = [](double y) { return 2.0 * std::log1p(0.5 * std::max(y, 0.0)); };
  return Nonlinearity(std::move(spec));
}

Nonlinearity make_custom(const std::string& f_expr, const std::string& f_prime_expr,
                         const std::string& log_f_expr, CustomNonlinearityOptions opts) {
  Expression f = Expression::parse(f_expr, "x");
  Expression fp = Expression::parse(f_prime_expr, "x");
  Expression lf = Expression::parse(log_f_expr, "w");
  NonlinearitySpec spec;
  spec.name = "custom";
  spec.f = [f](double x) { return f.eval(x); };
  spec.f_prime = [fp](double x) { return fp.eval(x); };
  spec.log_f = [lf](double w) { return lf.eval(w); };
  spec.declared_lambda = opts.declared_lambda;
  spec.monotone_from = opts.monotone_from;
  spec.concave_from = opts.concave_from;
  return Nonlinearity(std::move(spec));
}

}  // namespace growthlab
