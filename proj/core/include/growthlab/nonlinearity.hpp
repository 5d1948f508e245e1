#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace growthlab {

enum class LambdaKind { Zero, Finite, Infinite };

// Classification of lambda = lim f(x) / (x / log x).
struct LambdaClass {
  LambdaKind kind = LambdaKind::Zero;
  double value = 0.0;  // meaningful only when kind == Finite

  static LambdaClass zero() { return {LambdaKind::Zero, 0.0}; }
  static LambdaClass finite(double v) { return {LambdaKind::Finite, v}; }
  static LambdaClass infinite() { return {LambdaKind::Infinite, 0.0}; }
  bool is_zero() const { return kind == LambdaKind::Zero; }
  bool is_finite() const { return kind == LambdaKind::Finite; }
  bool is_infinite() const { return kind == LambdaKind::Infinite; }
};

struct LambdaClassifierOptions {
  double zero_threshold = 1e-3;
  double infinite_threshold = 1e3;
  // Sampling grid x = 10^k, k = k_lo .. k_hi.
  int k_lo = 2;
  int k_hi = 12;
};

enum class RvhwVerdict { Bounded, Unbounded };

struct NonlinearitySpec {
  std::string name;  // used in reports, e.g. "example(1)", "sqrt", "custom"
  std::function<double(double)> f;        // f(x), x > 0
  std::function<double(double)> f_prime;  // analytic derivative
  std::function<double(double)> log_f;    // w -> log f(e^w), overflow-safe
  std::optional<LambdaClass> declared_lambda;
  double monotone_from = 0.0;
  std::optional<double> concave_from;
  // Optional asymptotic hint: y -> approx log F^{-1}(y), used to seed the
  // inverse-transform bracket beyond the cached range.
  std::function<double(double)> approx_log_inverse;
};

// A sublinear growth nonlinearity together with its transform
// F(x) = integral from 1 to x of du / f(u), evaluated exclusively through the
// log substitution F(e^w) = integral of exp(v - log_f(v)) dv. The cumulative
// quadrature table is built eagerly at construction; instances are immutable
// and safe to evaluate concurrently.
class Nonlinearity {
 public:
  explicit Nonlinearity(NonlinearitySpec spec);

  const std::string& name() const { return spec_.name; }
  double f(double x) const { return spec_.f(x); }
  double f_prime(double x) const { return spec_.f_prime(x); }
  double log_f(double w) const { return spec_.log_f(w); }
  const std::function<double(double)>& f() const { return spec_.f; }
  const std::function<double(double)>& f_prime() const { return spec_.f_prime; }
  const std::function<double(double)>& log_f() const { return spec_.log_f; }
  const std::optional<LambdaClass>& declared_lambda() const { return spec_.declared_lambda; }
  double monotone_from() const { return spec_.monotone_from; }
  const std::optional<double>& concave_from() const { return spec_.concave_from; }

  // F(x); DomainError for x <= 0 or below the cached floor.
  double transform(double x) const;
  // F(e^w) directly from the log state.
  double transform_log(double w) const;
  // log F^{-1}(y); |F(e^w) - y| <= 1e-9 * max(1, y) at the returned w.
  double inverse_transform_log(double y) const;

  // Sampled estimate of lambda. Agrees with declared_lambda when present or
  // throws LambdaMismatch; throws NonMonotoneTail on oscillating samples.
  LambdaClass estimate_lambda(const LambdaClassifierOptions& opt = {}) const;
  // Declared lambda when present, otherwise the sampled estimate.
  LambdaClass effective_lambda() const;

  // Trend of f(x) F(x) / x on the sampling grid; throws InconclusiveTrend when
  // the tail is not monotone.
  RvhwVerdict check_rvhw() const;

 private:
  double segment_integral(double wa, double wb) const;
  double cached_value(double w) const;  // F(e^w) using the checkpoint table

  NonlinearitySpec spec_;
  // Checkpoints at unit spacing: F(e^w) for w = w_lo_ .. w_hi_.
  double w_lo_ = 0.0;
  double w_hi_ = 0.0;
  std::vector<double> table_;
};

// Shifted family f(x) = g(x + s(theta)), g(x) = (x+1)/log^theta(2+x),
// s(theta) = e^(theta+1) - 2, increasing and concave on (0, inf) with
// lambda = 0 / theta(=1) finite / infinity for theta > 1 / = 1 / < 1.
Nonlinearity make_example_family(double theta);

// f(x) = sqrt(x), with F(x) = 2(sqrt(x) - 1) available in closed form for
// cross-checks.
Nonlinearity make_sqrt();

struct CustomNonlinearityOptions {
  std::optional<LambdaClass> declared_lambda;
  double monotone_from = 0.0;
  std::optional<double> concave_from;
};

// Build from expression strings: f and f_prime use the variable "x"; log_f is
// the log-domain form in the variable "w" (w = log x).
Nonlinearity make_custom(const std::string& f_expr, const std::string& f_prime_expr,
                         const std::string& log_f_expr, CustomNonlinearityOptions opts = {});

}  // namespace growthlab
