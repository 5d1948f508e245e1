#include "growthlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/quadrature.hpp"

namespace growthlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Integral of g over [a, b] with 0 <= a <= b, using a log substitution above 1
// so that wide half-line ranges keep the adaptive subdivision well scaled.
double integrate_halfline_segment(const std::function<double(double)>& g, double a, double b,
                                  double rel_tol) {
  if (b <= a) return 0.0;
  double acc = 0.0;
  const double split = std::clamp(b, a, 1.0);
  if (split > a) {
    acc += integrate_adaptive(g, a, split, rel_tol).value;
  }
  if (b > 1.0) {
    const double lo = std::log(std::max(a, 1.0));
    const double hi = std::log(b);
    auto sub = [&](double p) {
      const double s = std::exp(p);
      return g(s) * s;
    };
    acc += integrate_adaptive(sub, lo, hi, rel_tol).value;
  }
  return acc;
}

}  // namespace

MeasureKernel MeasureKernel::delay_atoms(double tau, std::vector<Atom> atoms) {
  MeasureKernel k;
  k.support_ = SupportKind::DelayInterval;
  k.tau_ = tau;
  k.atoms_ = std::move(atoms);
  k.description_ = "delay-atoms(tau=" + format_double(tau) +
                   ", n=" + std::to_string(k.atoms_.size()) + ")";
  k.validate_and_seal();
  return k;
}

MeasureKernel MeasureKernel::delay_density(double tau, std::function<double(double)> density,
                                           std::vector<Atom> atoms) {
  MeasureKernel k;
  k.support_ = SupportKind::DelayInterval;
  k.tau_ = tau;
  k.atoms_ = std::move(atoms);
  k.density_ = std::move(density);
  k.description_ = "delay-density(tau=" + format_double(tau) + ")";
  k.validate_and_seal();
  return k;
}

MeasureKernel MeasureKernel::halfline_atoms(std::vector<Atom> atoms) {
  MeasureKernel k;
  k.support_ = SupportKind::HalfLine;
  k.atoms_ = std::move(atoms);
  k.description_ = "halfline-atoms(n=" + std::to_string(k.atoms_.size()) + ")";
  k.validate_and_seal();
  return k;
}

MeasureKernel MeasureKernel::halfline_density(std::function<double(double)> density,
                                              DensityTails tails, TruncationPolicy policy,
                                              std::vector<Atom> atoms) {
  MeasureKernel k;
  k.support_ = SupportKind::HalfLine;
  k.atoms_ = std::move(atoms);
  k.density_ = std::move(density);
  k.tails_ = std::move(tails);
  k.policy_ = policy;
  k.description_ = "halfline-density";
  k.validate_and_seal();
  return k;
}

MeasureKernel MeasureKernel::powerlaw(double alpha, double scale, TruncationPolicy policy) {
  if (!(alpha > 1.0)) {
    throw ValidationError("powerlaw kernel requires alpha > 1 for finite total mass");
  }
  if (!(scale > 0.0)) {
    throw ValidationError("powerlaw kernel requires a positive scale");
  }
  DensityTails tails;
  tails.mass_above = [alpha, scale](double t) {
    return scale * std::pow(1.0 + std::max(t, 0.0), 1.0 - alpha) / (alpha - 1.0);
  };
  tails.moment_above = [alpha, scale](double t) -> double {
    if (alpha <= 2.0) return kInf;
    const double u = 1.0 + std::max(t, 0.0);
    return scale * (std::pow(u, 2.0 - alpha) / (alpha - 2.0) - std::pow(u, 1.0 - alpha) / (alpha - 1.0));
  };
  tails.rv_index = alpha;
  MeasureKernel k = halfline_density(
      [alpha, scale](double s) { return scale * std::pow(1.0 + s, -alpha); }, std::move(tails),
      policy);
  k.description_ = "powerlaw(" + format_double(alpha) + ", " + format_double(scale) + ")";
  return k;
}

double MeasureKernel::tau() const {
  if (support_ != SupportKind::DelayInterval) {
    throw DomainError("tau() is only defined for delay-interval kernels");
  }
  return tau_;
}

double MeasureKernel::density(double s) const {
  if (!density_) throw DomainError("kernel has no density part");
  return density_(s);
}

void MeasureKernel::validate_and_seal() {
  if (support_ == SupportKind::DelayInterval && !(tau_ > 0.0)) {
    throw ValidationError("delay interval length tau must be positive");
  }
  const double lo = support_ == SupportKind::DelayInterval ? -tau_ : 0.0;
  const double hi = support_ == SupportKind::DelayInterval ? 0.0 : kInf;
  for (const Atom& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw ValidationError("atom weights must be positive and finite");
    }
    if (!std::isfinite(a.location) || a.location < lo - 1e-12 || a.location > hi) {
      throw ValidationError("atom location outside the kernel support");
    }
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });

  if (density_) {
    // Spot-check sign and finiteness of the density on its support.
    if (support_ == SupportKind::DelayInterval) {
      for (int i = 0; i <= 64; ++i) {
        const double s = -tau_ + tau_ * i / 64.0;
        const double v = density_(s);
        if (!std::isfinite(v) || v < 0.0) {
          throw ValidationError("density must be finite and non-negative on [-tau, 0]");
        }
      }
    } else {
      for (int i = 0; i <= 60; ++i) {
        const double s = i == 0 ? 0.0 : std::pow(10.0, -3.0 + 9.0 * (i - 1) / 59.0);
        if (s > policy_.s_max) break;
        const double v = density_(s);
        if (!std::isfinite(v) || v < 0.0) {
          throw ValidationError("density must be finite and non-negative on [0, inf)");
        }
      }
    }
  }

  // Total mass.
  double mass = 0.0;
  for (const Atom& a : atoms_) mass += a.weight;
  if (density_) {
    if (support_ == SupportKind::DelayInterval) {
      mass += integrate_adaptive([this](double s) { return density_(s); }, -tau_, 0.0).value;
    } else if (tails_.mass_above) {
      mass += tails_.mass_above(0.0);
    } else {
      const double body = integrate_halfline_segment([this](double s) { return density_(s); }, 0.0,
                                                     policy_.s_max, 1e-8);
      const double last = integrate_halfline_segment([this](double s) { return density_(s); },
                                                     0.5 * policy_.s_max, policy_.s_max, 1e-8);
      mass += body;
      report_.truncated = true;
      report_.horizon = policy_.s_max;
      report_.last_panel_mass = last;
    }
  }
  if (!std::isfinite(mass)) throw ValidationError("total mass is not finite");
  if (!(mass > 0.0)) throw NonPositiveMass("kernel total mass must be positive");
  total_mass_ = mass;

  // First moment (outcome replayed by first_moment()).
  double moment = 0.0;
  for (const Atom& a : atoms_) moment += std::abs(a.location) * a.weight;
  if (!density_) {
    moment_ = ExtendedReal::of(moment);
  } else if (support_ == SupportKind::DelayInterval) {
    moment += integrate_adaptive([this](double s) { return -s * density_(s); }, -tau_, 0.0).value;
    moment_ = ExtendedReal::of(moment);
  } else if (tails_.rv_index && *tails_.rv_index <= 2.0) {
    moment_ = ExtendedReal::infinity();
  } else if (tails_.moment_above) {
    const double m = tails_.moment_above(0.0);
    moment_ = std::isfinite(m) ? ExtendedReal::of(moment + m) : ExtendedReal::infinity();
  } else {
    const double body = integrate_halfline_segment([this](double s) { return s * density_(s); },
                                                   0.0, policy_.s_max, 1e-8);
    const double last = integrate_halfline_segment([this](double s) { return s * density_(s); },
                                                   0.5 * policy_.s_max, policy_.s_max, 1e-8);
    if (last > policy_.tolerance * std::max(1.0, body)) {
      moment_undecidable_ = true;
      moment_error_ =
          "first moment quadrature did not converge by s_max=" + format_double(policy_.s_max) +
          " (last dyadic panel " + format_double(last) + "); declare an analytic tail or RV index";
    } else {
      moment_ = ExtendedReal::of(moment + body);
    }
  }
}

ExtendedReal MeasureKernel::first_moment() const {
  if (moment_undecidable_) throw MomentUndecidable(moment_error_);
  return moment_;
}

double MeasureKernel::density_mass_above(double t) const {
  if (!density_) return 0.0;
  const double a = std::max(t, 0.0);
  if (tails_.mass_above) return std::max(0.0, tails_.mass_above(a));
  if (a >= policy_.s_max) return 0.0;
  return integrate_halfline_segment([this](double s) { return density_(s); }, a, policy_.s_max,
                                    1e-8);
}

double MeasureKernel::density_mass_between(double a, double b) const {
  if (!density_) return 0.0;
  if (support_ == SupportKind::DelayInterval) {
    const double lo = std::max(a, -tau_);
    const double hi = std::min(b, 0.0);
    if (hi <= lo) return 0.0;
    return integrate_adaptive([this](double s) { return density_(s); }, lo, hi).value;
  }
  const double lo = std::max(a, 0.0);
  if (std::isinf(b)) return density_mass_above(lo);
  if (b <= lo) return 0.0;
  if (tails_.mass_above) {
    const double above_lo = tails_.mass_above(lo);
    const double d = above_lo - tails_.mass_above(b);
    // Narrow windows can cancel in the analytic difference; fall back to direct
    // quadrature when most significant digits would be lost.
    if (d > 1e-9 * above_lo) return d;
    return integrate_adaptive([this](double s) { return density_(s); }, lo, b).value;
  }
  return integrate_halfline_segment([this](double s) { return density_(s); }, lo,
                                    std::min(b, policy_.s_max), 1e-8);
}

double MeasureKernel::tail_mass(double t) const {
  if (support_ != SupportKind::HalfLine) {
    throw WrongSupport("tail_mass is only defined for half-line kernels");
  }
  if (!(t >= 0.0)) throw DomainError("tail_mass requires t >= 0");
  double acc = 0.0;
  for (const Atom& a : atoms_) {
    if (a.location > t) acc += a.weight;
  }
  return acc + density_mass_above(t);
}

double MeasureKernel::window_mass(double a, double b) const {
  if (std::isnan(a) || std::isnan(b) || a > b || a < 0.0) {
    throw BadWindow("window_mass requires 0 <= a <= b");
  }
  double acc = 0.0;
  for (const Atom& at : atoms_) {
    if (at.location >= a && at.location <= b) acc += at.weight;
  }
  return acc + density_mass_between(a, b);
}

double MeasureKernel::window_mass_open_left(double a, double b) const {
  if (std::isnan(a) || std::isnan(b) || a > b || a < 0.0) {
    throw BadWindow("window_mass_open_left requires 0 <= a <= b");
  }
  double acc = 0.0;
  for (const Atom& at : atoms_) {
    if (at.location > a && at.location <= b) acc += at.weight;
  }
  return acc + density_mass_between(a, b);
}

double MeasureKernel::partial_moment(double t) const {
  if (support_ != SupportKind::HalfLine) {
    throw WrongSupport("partial_moment is only defined for half-line kernels");
  }
  if (!(t >= 0.0)) throw DomainError("partial_moment requires t >= 0");
  double acc = 0.0;
  for (const Atom& a : atoms_) {
    if (a.location <= t) acc += a.location * a.weight;
  }
  if (density_) {
    const double hi = tails_.mass_above ? t : std::min(t, policy_.s_max);
    acc += integrate_halfline_segment([this](double s) { return s * density_(s); }, 0.0, hi,
                                      tails_.mass_above ? 1e-10 : 1e-8);
  }
  return acc;
}

double MeasureKernel::integrated_tail(double t) const {
  if (support_ != SupportKind::HalfLine) {
    throw WrongSupport("integrated_tail is only defined for half-line kernels");
  }
  if (!(t >= 0.0)) throw DomainError("integrated_tail requires t >= 0");
  if (t == 0.0) return 0.0;
  // The integrand s -> mu((s, inf)) is smooth between atom locations; split
  // there so the adaptive rule only ever sees smooth pieces.
  std::vector<double> cuts{0.0};
  for (const Atom& a : atoms_) {
    if (a.location > 0.0 && a.location < t) cuts.push_back(a.location);
  }
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  auto integrand = [this](double s) { return tail_mass(s); };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    acc += integrate_halfline_segment(integrand, cuts[i], cuts[i + 1], 1e-10);
  }
  return acc;
}

}  // namespace growthlab
