#include "growthlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "growthlab/errors.hpp"

namespace growthlab {
namespace {

// Kronrod-15 abscissae on [-1,1]; odd entries are the embedded Gauss-7 nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GK {
  double kronrod;
  double gauss;
};

GK gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double sum = f(c - x) + f(c + x);
    resk += kWgk[j] * sum;
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  return {resk * h, resg * h};
}

struct Acc {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

void refine(const std::function<double(double)>& f, double a, double b, double tol, int depth,
            Acc& acc) {
  const GK est = gk15(f, a, b);
  if (!std::isfinite(est.kronrod)) {
    throw ValidationError("non-finite integrand encountered in adaptive quadrature");
  }
  const double err = std::abs(est.kronrod - est.gauss);
  if (err <= tol || depth <= 0) {
    acc.value += est.kronrod;
    acc.error += err;
    if (depth <= 0 && err > tol) acc.converged = false;
    return;
  }
  const double c = 0.5 * (a + b);
  refine(f, a, c, 0.5 * tol, depth - 1, acc);
  refine(f, c, b, 0.5 * tol, depth - 1, acc);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_floor, int max_depth) {
  if (a == b) return {0.0, 0.0, true};
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  const GK whole = gk15(f, a, b);
  if (!std::isfinite(whole.kronrod)) {
    throw ValidationError("non-finite integrand encountered in adaptive quadrature");
  }
  const double tol = std::max(abs_floor, rel_tol * std::abs(whole.kronrod));
  Acc acc;
  refine(f, a, b, tol, max_depth, acc);
  return {sign * acc.value, acc.error, acc.converged};
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels <= 0 || panels % 2 != 0) {
    throw DomainError("composite Simpson needs a positive even panel count");
  }
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

}  // namespace growthlab
