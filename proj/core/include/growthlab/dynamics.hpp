#pragma once

#include <functional>
#include <string>
#include <vector>

#include "growthlab/measures.hpp"
#include "growthlab/nonlinearity.hpp"

namespace growthlab {

enum class EquationKind { Ode, Fde, Vde };

// Positive initial data on [-tau, 0], evaluated in log space.
class HistoryFunction {
 public:
  // psi(t) = psi0 for all t <= 0.
  static HistoryFunction constant(double psi0);
  // Sampled positive values on an ascending grid ending at 0; evaluated by
  // cubic Hermite interpolation of log psi with finite-difference slopes.
  static HistoryFunction sampled(std::vector<double> times, std::vector<double> values);

  double log_at(double t) const;  // t <= 0; clamped to the covered range
  bool covers(double t) const;    // true if t is inside the sampled range
  double initial_log() const { return log_at(0.0); }

 private:
  HistoryFunction() = default;
  bool constant_ = true;
  double log0_ = 0.0;
  std::vector<double> times_, logs_, slopes_;
};

struct IntegrationOptions {
  double t_end = 100.0;
  double h = 1.0 / 32.0;
  int output_every = 32;             // steps between recorded output points
  int density_panels = 64;           // Simpson panels for the delay density
  double overflow_log_limit = 1e6;   // abort threshold on u = log x
};

// Log-state trajectory with per-point diagnostics against the reference ODE
// solution y(t) = F^{-1}(F(y0) + M t).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> log_state;   // u(t) = log x(t)
  std::vector<double> log_ref;     // log F^{-1}(M t)
  std::vector<double> ratio;       // r(t) = exp(u - log_ref)
  std::vector<double> deficit;     // d(t) = (F(x) - M t)/log f(x); NaN where log f ~ 0
  std::vector<double> correction;  // c(t) = -(F(x) - M t)/log F^{-1}(M t); NaN near t = 0
  EquationKind kind = EquationKind::Ode;
  double mass = 0.0;
  double step = 0.0;
  int output_every = 1;
  std::string scheme;
  TruncationReport truncation;
};

// Reference equation x' = M f(x): solved through the transform, not stepped.
Trajectory integrate_ode(const Nonlinearity& n, double mass, double y0,
                         const IntegrationOptions& opt);

// Delay equation x'(t) = integral over [-tau, 0] of mu(ds) f(x(t+s)), advanced
// by RK4 on u = log x with method of steps and cubic Hermite dense output.
Trajectory integrate_fde(const Nonlinearity& n, const MeasureKernel& kernel,
                         const HistoryFunction& psi, const IntegrationOptions& opt);

// Volterra equation x'(t) = integral over [0, t] of mu(ds) f(x(t-s)); the
// growing-memory convolution uses composite Simpson weights on the stored
// grid with Hermite-interpolated half-step states.
Trajectory integrate_vde(const Nonlinearity& n, const MeasureKernel& kernel, double x0,
                         const IntegrationOptions& opt);

struct RefineResult {
  Trajectory coarse;
  Trajectory fine;
  double sup_diff = 0.0;  // sup |u_h - u_{h/2}| over the shared output times
};

// Runs the same integration at h and h/2 (output thinning doubled so the
// output grids coincide) and reports the sup-norm log-state difference.
RefineResult refine_check(const std::function<Trajectory(const IntegrationOptions&)>& run,
                          const IntegrationOptions& opt);

// Sup |log_state| difference over shared times; throws if the grids differ.
double max_log_state_gap(const Trajectory& a, const Trajectory& b);

// CSV with header t,u,log_ref,r,d,c and 17-significant-digit values.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace growthlab
