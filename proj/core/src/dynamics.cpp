#include "growthlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "growthlab/errors.hpp"

namespace growthlab {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_common_options(const IntegrationOptions& opt) {
  if (!(opt.t_end > 0.0) || !std::isfinite(opt.t_end)) {
    throw ValidationError("t_end must be positive and finite");
  }
  if (!(opt.h > 0.0) || !std::isfinite(opt.h)) throw ValidationError("h must be positive");
  if (opt.output_every < 1) throw ValidationError("output_every must be >= 1");
  if (opt.density_panels < 2 || opt.density_panels % 2 != 0) {
    throw ValidationError("density_panels must be an even count >= 2");
  }
}

long long step_count(const IntegrationOptions& opt) {
  const long long n = std::llround(opt.t_end / opt.h);
  if (n < 1) throw ValidationError("t_end shorter than one step");
  return n;
}

void fill_diagnostics(Trajectory& tr, const Nonlinearity& n) {
  const std::size_t m = tr.times.size();
  tr.log_ref.resize(m);
  tr.ratio.resize(m);
  tr.deficit.resize(m);
  tr.correction.resize(m);
  const auto& lf = n.log_f();
  for (std::size_t i = 0; i < m; ++i) {
    const double y = tr.mass * tr.times[i];
    const double u = tr.log_state[i];
    const double wref = n.inverse_transform_log(y);
    const double Fx = n.transform_log(u);
    const double lfu = lf(u);
    tr.log_ref[i] = wref;
    tr.ratio[i] = std::exp(u - wref);
    tr.deficit[i] = std::abs(lfu) > 1e-12 ? (Fx - y) / lfu : kNan;
    tr.correction[i] = wref > 1e-3 ? -(Fx - y) / wref : kNan;
  }
}

// Cubic Hermite value on a uniform grid of (value, derivative) nodes.
double hermite_eval(const std::vector<double>& u, const std::vector<double>& du,
                    std::size_t last, double h, double T) {
  std::size_t i = static_cast<std::size_t>(T / h);
  if (i >= last) i = last - 1;
  const double th = (T - i * h) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = 3.0 * th2 - 2.0 * th3;
  const double h11 = th3 - th2;
  return h00 * u[i] + h * h10 * du[i] + h01 * u[i + 1] + h * h11 * du[i + 1];
}

// ---------------------------------------------------------------------------
// Delay equation stepper (method of steps).

class FdeStepper {
 public:
  FdeStepper(const Nonlinearity& n, const MeasureKernel& kernel, const HistoryFunction& psi,
             const IntegrationOptions& opt)
      : lf_(n.log_f()), kernel_(kernel), psi_(psi), h_(opt.h) {
    if (kernel.support() != SupportKind::DelayInterval) {
      throw WrongSupport("integrate_fde requires a delay-interval kernel");
    }
    tau_ = kernel.tau();
    if (tau_ > 0.0 && opt.h > tau_ / 16.0 + 1e-12) {
      throw StepTooLarge("integrate_fde requires h <= tau/16");
    }
    if (!psi.covers(-tau_)) {
      throw ValidationError("history must cover [-tau, 0]");
    }
    if (kernel.has_density()) {
      // Fixed Simpson nodes and (weight * density) products on [-tau, 0].
      const int p = opt.density_panels;
      const double delta = tau_ / p;
      for (int i = 0; i <= p; ++i) {
        const double s = -tau_ + i * delta;
        double w = (i == 0 || i == p) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        dens_node_.push_back(s);
        dens_w_.push_back(w * delta / 3.0 * kernel.density(s));
      }
    }
    u_.push_back(psi.log_at(0.0));
    du_.push_back(functional(0.0, u_.front()));
  }

  // u at time T <= Ts; Ts is the stage time, Us the stage state used for the
  // not-yet-committed sliver (t_n, Ts].
  double state_at(double T, double Ts, double Us) const {
    if (T <= 0.0) return psi_.log_at(T);
    const double tn = (u_.size() - 1) * h_;
    if (T >= tn) {
      if (!(Ts > tn) || T <= tn) return u_.back();
      return u_.back() + (Us - u_.back()) * (T - tn) / (Ts - tn);
    }
    return hermite_eval(u_, du_, u_.size() - 1, h_, T);
  }

  double functional(double Ts, double Us) const {
    double g = 0.0;
    for (const Atom& a : kernel_.atoms()) {
      g += a.weight * std::exp(lf_(state_at(Ts + a.location, Ts, Us)) - Us);
    }
    for (std::size_t i = 0; i < dens_node_.size(); ++i) {
      g += dens_w_[i] * std::exp(lf_(state_at(Ts + dens_node_[i], Ts, Us)) - Us);
    }
    return g;
  }

  void step(double overflow_limit) {
    const double tn = (u_.size() - 1) * h_;
    const double un = u_.back();
    const double k1 = du_.back();
    const double U2 = un + 0.5 * h_ * k1;
    const double k2 = functional(tn + 0.5 * h_, U2);
    const double U3 = un + 0.5 * h_ * k2;
    const double k3 = functional(tn + 0.5 * h_, U3);
    const double U4 = un + h_ * k3;
    const double k4 = functional(tn + h_, U4);
    const double unew = un + h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(unew) || unew > overflow_limit) {
      throw OverflowGuard("log-state exceeded the overflow guard in integrate_fde");
    }
    const double dnew = functional(tn + h_, unew);  // sliver handled against unew
    u_.push_back(unew);
    du_.push_back(dnew);
  }

  const std::vector<double>& log_states() const { return u_; }

 private:
  const std::function<double(double)>& lf_;
  const MeasureKernel& kernel_;
  const HistoryFunction& psi_;
  double h_;
  double tau_ = 0.0;
  std::vector<double> u_, du_;
  std::vector<double> dens_node_, dens_w_;
};

// ---------------------------------------------------------------------------
// Volterra stepper (growing trapezoidal memory).

class VdeStepper {
 public:
  VdeStepper(const Nonlinearity& n, const MeasureKernel& kernel, double x0,
             const IntegrationOptions& opt, long long total_steps)
      : lf_(n.log_f()), kernel_(kernel), h_(opt.h) {
    if (kernel.support() != SupportKind::HalfLine) {
      throw WrongSupport("integrate_vde requires a half-line kernel");
    }
    if (!(x0 > 0.0) || !std::isfinite(x0)) {
      throw ValidationError("integrate_vde requires x0 > 0");
    }
    if (kernel.has_density()) {
      const double s_cap = kernel.truncation_policy().s_max;
      j_cap_ = static_cast<long long>(std::floor(s_cap / h_));
      kc0_.resize(total_steps + 2);
      kch_.resize(total_steps + 1);
      for (long long j = 0; j < static_cast<long long>(kc0_.size()); ++j) {
        kc0_[j] = j <= j_cap_ ? kernel.density(j * h_) : 0.0;
      }
      for (long long j = 0; j < static_cast<long long>(kch_.size()); ++j) {
        kch_[j] = j <= j_cap_ ? kernel.density(j * h_ + 0.5 * h_) : 0.0;
      }
      kq_ = 0.25 * h_ <= s_cap ? kernel.density(0.25 * h_) : 0.0;
      memory_truncated_ = total_steps > j_cap_;
    }
    u_.reserve(total_steps + 1);
    lfu_.reserve(total_steps + 1);
    du_.reserve(total_steps + 1);
    lfh_.reserve(total_steps + 1);
    u_.push_back(std::log(x0));
    lfu_.push_back(lf_(u_.front()));
    // x'(0) = mu({0}) f(x0): only an atom at the origin contributes at t=0.
    du_.push_back(std::exp(lfu_.front() - u_.front()) *
                  atoms_sum(0.0, u_.front(), lfu_.front()));
  }

  // Scaled atom contribution: sum over atoms with location <= Ts of
  // w * exp(lf(u(Ts - loc)) - B), with the sliver (t_n, Ts] linearized.
  double atoms_sum(double Ts, double Us, double B) const {
    const double tn = (u_.size() - 1) * h_;
    double g = 0.0;
    for (const Atom& a : kernel_.atoms()) {
      if (a.location > Ts + 1e-12 * (1.0 + Ts)) continue;
      const double T = std::max(0.0, Ts - a.location);
      double val;
      if (T >= tn) {
        val = (Ts > tn && T > tn) ? u_.back() + (Us - u_.back()) * (T - tn) / (Ts - tn)
                                  : u_.back();
      } else {
        val = hermite_eval(u_, du_, u_.size() - 1, h_, T);
      }
      g += a.weight * std::exp(lf_(val) - B);
    }
    return g;
  }

  // Refill the scaled state caches for the current step: e_grid_[i] =
  // exp(lf(u_i) - B) and e_half_[i] = exp(lf at the interval-i midpoint - B).
  // Far-past entries underflow to 0 harmlessly.
  void refresh_scaled(double B) {
    const std::size_t n = u_.size() - 1;
    e_grid_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) e_grid_[i] = std::exp(lfu_[i] - B);
    e_half_.resize(n);
    for (std::size_t i = 0; i < n; ++i) e_half_[i] = std::exp(lfh_[i] - B);
  }

  // Composite Simpson over the committed panels for the stage integrals at
  // t_n + h/2: s in [h/2, t_n + h/2] substituted to sigma in [0, t_n]. Panel
  // ends land on the half-step kernel cache, panel midpoints on the whole-step
  // one. Trapezoid here is not enough: the kernel curvature at the head
  // otherwise injects an O(h^2) bias that compounds over the whole run.
  double tail_sum_half() const {
    const std::size_t n = u_.size() - 1;
    if (n == 0 || kc0_.empty()) return 0.0;
    double ends = kch_[0] * e_grid_[n] + kch_[n] * e_grid_[0];
    for (std::size_t j = 1; j < n; ++j) ends += 2.0 * kch_[j] * e_grid_[n - j];
    double mids = 0.0;
    for (std::size_t i = 1; i <= n; ++i) mids += kc0_[i] * e_half_[n - i];
    return h_ / 6.0 * (ends + 4.0 * mids);
  }

  // Same for the full-step stage at t_n + h: s in [h, t_n + h].
  double tail_sum_full() const {
    const std::size_t n = u_.size() - 1;
    if (n == 0 || kc0_.empty()) return 0.0;
    double ends = kc0_[1] * e_grid_[n] + kc0_[n + 1] * e_grid_[0];
    for (std::size_t j = 2; j <= n; ++j) ends += 2.0 * kc0_[j] * e_grid_[n + 1 - j];
    double mids = 0.0;
    for (std::size_t i = 1; i <= n; ++i) mids += kch_[i] * e_half_[n - i];
    return h_ / 6.0 * (ends + 4.0 * mids);
  }

  // Simpson over the leading [0, h/2] sliver of a half-step stage; the state
  // at lag h/4 is linear between the stage head and the last committed node.
  double head_half(double Us, double B) const {
    if (kc0_.empty()) return 0.0;
    const std::size_t n = u_.size() - 1;
    const double un = u_[n];
    return h_ / 12.0 * (kc0_[0] * std::exp(lf_(Us) - B) +
                        4.0 * kq_ * std::exp(lf_(0.5 * (un + Us)) - B) +
                        kch_[0] * e_grid_[n]);
  }

  // Simpson over the leading [0, h] sliver of the full-step stage; u_mid is
  // the stage estimate of the state at t_n + h/2.
  double head_full(double Us, double u_mid, double B) const {
    if (kc0_.empty()) return 0.0;
    const std::size_t n = u_.size() - 1;
    return h_ / 6.0 * (kc0_[0] * std::exp(lf_(Us) - B) +
                       4.0 * kch_[0] * std::exp(lf_(u_mid) - B) +
                       kc0_[1] * e_grid_[n]);
  }

  void step(double overflow_limit) {
    const std::size_t n = u_.size() - 1;
    const double tn = n * h_;
    const double un = u_[n];
    const double B = lfu_[n];
    const double k1 = du_[n];

    refresh_scaled(B);
    const double tail_half = tail_sum_half();
    const double tail_full = tail_sum_full();

    const double U2 = un + 0.5 * h_ * k1;
    const double k2 = std::exp(B - U2) *
                      (tail_half + head_half(U2, B) + atoms_sum(tn + 0.5 * h_, U2, B));
    const double U3 = un + 0.5 * h_ * k2;
    const double k3 = std::exp(B - U3) *
                      (tail_half + head_half(U3, B) + atoms_sum(tn + 0.5 * h_, U3, B));
    const double U4 = un + h_ * k3;
    const double k4 = std::exp(B - U4) *
                      (tail_full + head_full(U4, un + 0.5 * h_ * k3, B) +
                       atoms_sum(tn + h_, U4, B));

    const double unew = un + h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(unew) || unew > overflow_limit) {
      throw OverflowGuard("log-state exceeded the overflow guard in integrate_vde");
    }
    const double lfnew = lf_(unew);

    // Midpoint of the interval just produced (Hermite at s = 1/2), first with
    // the stage slope k4 standing in for u'(t_{n+1}), refreshed once the
    // committed derivative is known.
    double u_half_new = 0.5 * (un + unew) + h_ * (k1 - k4) / 8.0;

    // Committed derivative at t_{n+1}: composite Simpson over [0, t_{n+1}]
    // including the new node, plus atom terms (sliver against unew).
    double dnew = 0.0;
    if (!kc0_.empty()) {
      const std::size_t m = n + 1;
      double ends = kc0_[0] * std::exp(lfnew - B) + kc0_[m] * e_grid_[0];
      for (std::size_t j = 1; j < m; ++j) ends += 2.0 * kc0_[j] * e_grid_[m - j];
      double mids = kch_[0] * std::exp(lf_(u_half_new) - B);
      for (std::size_t j = 1; j < m; ++j) mids += kch_[j] * e_half_[m - 1 - j];
      dnew += std::exp(B - unew) * h_ / 6.0 * (ends + 4.0 * mids);
    }
    dnew += std::exp(lfnew - unew) * atoms_sum(tn + h_, unew, lfnew);

    u_half_new = 0.5 * (un + unew) + h_ * (k1 - dnew) / 8.0;
    u_.push_back(unew);
    lfu_.push_back(lfnew);
    du_.push_back(dnew);
    lfh_.push_back(lf_(u_half_new));
  }

  const std::vector<double>& log_states() const { return u_; }
  bool memory_truncated() const { return memory_truncated_; }

 private:
  const std::function<double(double)>& lf_;
  const MeasureKernel& kernel_;
  double h_;
  long long j_cap_ = 0;
  double kq_ = 0.0;  // k(h/4), for the half-step head panel
  bool memory_truncated_ = false;
  std::vector<double> u_, lfu_, du_, lfh_;
  std::vector<double> kc0_, kch_;
  std::vector<double> e_grid_, e_half_;  // per-step scaled state caches
};

template <typename Stepper>
Trajectory run_steps(Stepper& stepper, const Nonlinearity& n, const MeasureKernel& kernel,
                     const IntegrationOptions& opt, EquationKind kind, const char* scheme) {
  const long long total = step_count(opt);
  Trajectory tr;
  tr.kind = kind;
  tr.mass = kernel.total_mass();
  tr.step = opt.h;
  tr.output_every = opt.output_every;
  tr.scheme = scheme;
  tr.truncation = kernel.truncation_report();
  for (long long i = 1; i <= total; ++i) stepper.step(opt.overflow_log_limit);
  const std::vector<double>& u = stepper.log_states();
  for (long long i = 0; i <= total; ++i) {
    if (i % opt.output_every == 0 || i == total) {
      tr.times.push_back(i * opt.h);
      tr.log_state.push_back(u[static_cast<std::size_t>(i)]);
    }
  }
  fill_diagnostics(tr, n);
  return tr;
}

}  // namespace

// ---------------------------------------------------------------------------
// HistoryFunction

HistoryFunction HistoryFunction::constant(double psi0) {
  if (!(psi0 > 0.0) || !std::isfinite(psi0)) {
    throw NonPositiveHistory("constant history requires psi0 > 0");
  }
  HistoryFunction h;
  h.constant_ = true;
  h.log0_ = std::log(psi0);
  return h;
}

HistoryFunction HistoryFunction::sampled(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ValidationError("sampled history needs matching grids with >= 2 points");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ValidationError("history times must be ascending");
  }
  if (std::abs(times.back()) > 1e-9) {
    throw ValidationError("history grid must end at t = 0");
  }
  HistoryFunction h;
  h.constant_ = false;
  h.times_ = std::move(times);
  h.times_.back() = 0.0;
  h.logs_.resize(h.times_.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw NonPositiveHistory("history values must be positive");
    }
    h.logs_[i] = std::log(values[i]);
  }
  const std::size_t m = h.times_.size();
  h.slopes_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == m ? i : i + 1;
    h.slopes_[i] = (h.logs_[b] - h.logs_[a]) / (h.times_[b] - h.times_[a]);
  }
  return h;
}

double HistoryFunction::log_at(double t) const {
  if (constant_) return log0_;
  if (t <= times_.front()) return logs_.front();
  if (t >= times_.back()) return logs_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double dt = times_[i + 1] - times_[i];
  const double th = (t - times_[i]) / dt;
  const double th2 = th * th;
  const double th3 = th2 * th;
  return (2.0 * th3 - 3.0 * th2 + 1.0) * logs_[i] + (th3 - 2.0 * th2 + th) * dt * slopes_[i] +
         (3.0 * th2 - 2.0 * th3) * logs_[i + 1] + (th3 - th2) * dt * slopes_[i + 1];
}

bool HistoryFunction::covers(double t) const {
  if (constant_) return true;
  return t >= times_.front() - 1e-9;
}

// ---------------------------------------------------------------------------
// Integrators

Trajectory integrate_ode(const Nonlinearity& n, double mass, double y0,
                         const IntegrationOptions& opt) {
  check_common_options(opt);
  if (!(mass > 0.0) || !std::isfinite(mass)) throw NonPositiveMass("ode mass must be positive");
  if (!(y0 > 0.0) || !std::isfinite(y0)) throw ValidationError("ode requires y0 > 0");
  const long long total = step_count(opt);
  const double F0 = n.transform(y0);
  Trajectory tr;
  tr.kind = EquationKind::Ode;
  tr.mass = mass;
  tr.step = opt.h;
  tr.output_every = opt.output_every;
  tr.scheme = "transform";
  for (long long i = 0; i <= total; ++i) {
    if (i % opt.output_every == 0 || i == total) {
      const double t = i * opt.h;
      tr.times.push_back(t);
      tr.log_state.push_back(n.inverse_transform_log(F0 + mass * t));
    }
  }
  fill_diagnostics(tr, n);
  return tr;
}

Trajectory integrate_fde(const Nonlinearity& n, const MeasureKernel& kernel,
                         const HistoryFunction& psi, const IntegrationOptions& opt) {
  check_common_options(opt);
  FdeStepper stepper(n, kernel, psi, opt);
  return run_steps(stepper, n, kernel, opt, EquationKind::Fde, "rk4-steps");
}

Trajectory integrate_vde(const Nonlinearity& n, const MeasureKernel& kernel, double x0,
                         const IntegrationOptions& opt) {
  check_common_options(opt);
  VdeStepper stepper(n, kernel, x0, opt, step_count(opt));
  Trajectory tr = run_steps(stepper, n, kernel, opt, EquationKind::Vde, "rk4-volterra");
  if (stepper.memory_truncated()) {
    tr.truncation.truncated = true;
    tr.truncation.horizon = kernel.truncation_policy().s_max;
  }
  return tr;
}

RefineResult refine_check(const std::function<Trajectory(const IntegrationOptions&)>& run,
                          const IntegrationOptions& opt) {
  RefineResult out;
  out.coarse = run(opt);
  IntegrationOptions fine = opt;
  fine.h = 0.5 * opt.h;
  fine.output_every = 2 * opt.output_every;
  out.fine = run(fine);
  out.sup_diff = max_log_state_gap(out.coarse, out.fine);
  return out;
}

double max_log_state_gap(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size()) {
    throw ValidationError("trajectories have different output grids");
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-9 * (1.0 + std::abs(a.times[i]))) {
      throw ValidationError("trajectory output times do not line up");
    }
    sup = std::max(sup, std::abs(a.log_state[i] - b.log_state[i]));
  }
  return sup;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ValidationError("cannot open " + path + " for writing");
  std::fputs("t,u,log_ref,r,d,c\n", f);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[i], traj.log_state[i],
                 traj.log_ref[i], traj.ratio[i], traj.deficit[i], traj.correction[i]);
  }
  std::fclose(f);
}

}  // namespace growthlab
