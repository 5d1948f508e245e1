#include "growthlab/trend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "growthlab/errors.hpp"

namespace growthlab {

namespace {

// Index of the sample whose time is closest to target.
std::size_t nearest_index(const std::vector<double>& t, double target) {
  const auto it = std::lower_bound(t.begin(), t.end(), target);
  if (it == t.begin()) return 0;
  if (it == t.end()) return t.size() - 1;
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  return (target - t[j - 1] <= t[j] - target) ? j - 1 : j;
}

}  // namespace

PowerTailFit fit_power_tail(const std::vector<double>& t, const std::vector<double>& r) {
  if (t.size() != r.size()) throw ValidationError("fit_power_tail: size mismatch");
  PowerTailFit out;
  if (t.size() < 3) {
    if (!r.empty()) out.limit = r.back();
    return out;
  }
  const double t_end = t.back();
  const std::size_t i1 = nearest_index(t, 0.25 * t_end);
  const std::size_t i2 = nearest_index(t, 0.5 * t_end);
  const std::size_t i3 = t.size() - 1;
  out.limit = r[i3];
  if (i1 >= i2 || i2 >= i3) return out;
  const double r1 = r[i1], r2 = r[i2], r3 = r[i3];
  const double d12 = r1 - r2;
  const double d23 = r2 - r3;
  const double noise = 1e-13 * std::max(1.0, std::abs(r3));
  if (std::abs(d23) < noise) {
    // Already flat to working precision; the final value is the limit.
    out.ok = true;
    return out;
  }
  const double ratio = d12 / d23;
  if (!(ratio > 1.05) || !(ratio < 1e6)) return out;
  const double rho = t[i3] / t[i2];  // geometric spacing factor (~2)
  const double beta = std::log(ratio) / std::log(rho);
  const double scaled = d23 / (std::pow(rho, beta) - 1.0);  // a * t3^{-beta}
  out.limit = r3 - scaled;
  out.amplitude = scaled * std::pow(t[i3], beta);
  out.beta = beta;
  out.ok = std::isfinite(out.limit);
  if (!out.ok) out.limit = r3;
  return out;
}

double spearman_rho(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;  // average rank for ties
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  const double mean = 0.5 * (n + 1);
  double num = 0.0, den_r = 0.0, den_i = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = rank[k] - mean;
    const double b = (k + 1.0) - mean;
    num += a * b;
    den_r += a * a;
    den_i += b * b;
  }
  if (den_r <= 0.0 || den_i <= 0.0) return 0.0;
  return num / std::sqrt(den_r * den_i);
}

}  // namespace growthlab
