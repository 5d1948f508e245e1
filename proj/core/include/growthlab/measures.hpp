#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace growthlab {

// Either a finite value or +infinity (used for first moments).
struct ExtendedReal {
  double value = 0.0;
  bool finite = true;

  static ExtendedReal of(double v) { return {v, true}; }
  static ExtendedReal infinity() { return {0.0, false}; }
  bool is_finite() const { return finite; }
};

enum class SupportKind { DelayInterval, HalfLine };

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

// Optional analytic companions for a half-line density k(s):
//   mass_above(t)   = integral of k over [t, inf)
//   moment_above(t) = integral of s*k(s) over [t, inf), may return +inf
//   rv_index        = alpha such that k is regularly varying with index -alpha
struct DensityTails {
  std::function<double(double)> mass_above;
  std::function<double(double)> moment_above;
  std::optional<double> rv_index;
};

// Horizon and tolerance used when only numeric quadrature of the density is
// possible (no analytic tails declared).
struct TruncationPolicy {
  double s_max = 1e6;
  double tolerance = 1e-8;
};

struct TruncationReport {
  bool truncated = false;       // true if any tail was cut at s_max numerically
  double horizon = 0.0;         // the horizon used
  double last_panel_mass = 0.0; // mass of the final dyadic panel (convergence indicator)
};

// A positive measure on either a compact delay interval [-tau, 0] or the half
// line [0, inf): finitely many atoms plus an optional density. Immutable after
// construction; safe to share across threads.
class MeasureKernel {
 public:
  static MeasureKernel delay_atoms(double tau, std::vector<Atom> atoms);
  static MeasureKernel delay_density(double tau, std::function<double(double)> density,
                                     std::vector<Atom> atoms = {});
  static MeasureKernel halfline_atoms(std::vector<Atom> atoms);
  static MeasureKernel halfline_density(std::function<double(double)> density,
                                        DensityTails tails = {}, TruncationPolicy policy = {},
                                        std::vector<Atom> atoms = {});
  // k(s) = scale * (1+s)^(-alpha) on [0, inf) with analytic tails; alpha > 1.
  static MeasureKernel powerlaw(double alpha, double scale, TruncationPolicy policy = {});

  SupportKind support() const { return support_; }
  double tau() const;  // DomainError on half-line kernels
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool has_density() const { return static_cast<bool>(density_); }
  double density(double s) const;
  const std::optional<double>& rv_index() const { return tails_.rv_index; }

  // Total mass M > 0 (atoms plus density).
  double total_mass() const { return total_mass_; }

  // First absolute moment C = sum |s_j| w_j + integral |s| k(s) ds.
  // Returns the +infinity flag for declared heavy tails; throws
  // MomentUndecidable if numeric truncation cannot settle convergence.
  ExtendedReal first_moment() const;

  // mu((t, inf)), open at t. Half-line only.
  double tail_mass(double t) const;

  // mu([a, b]); atoms exactly at the endpoints count with full weight.
  // Requires 0 <= a <= b (b may be +inf).
  double window_mass(double a, double b) const;

  // mu((a, b]); atoms exactly at a are excluded. Same preconditions.
  double window_mass_open_left(double a, double b) const;

  // integral of s mu(ds) over [0, t]. Half-line only.
  double partial_moment(double t) const;

  // T(t) = integral over [0, t] of tail_mass(s) ds, computed by adaptive
  // quadrature of the (piecewise smooth, monotone) integrand. Half-line only.
  double integrated_tail(double t) const;

  const TruncationPolicy& truncation_policy() const { return policy_; }
  const TruncationReport& truncation_report() const { return report_; }
  const std::string& describe() const { return description_; }

 private:
  MeasureKernel() = default;
  void validate_and_seal();
  double density_mass_between(double a, double b) const;  // integral of k over [a,b] (support-clipped)
  double density_mass_above(double t) const;              // half-line tail of the density
  double density_partial_moment(double t) const;          // integral of s k(s) over [0,t]

  SupportKind support_ = SupportKind::HalfLine;
  double tau_ = 0.0;
  std::vector<Atom> atoms_;
  std::function<double(double)> density_;
  DensityTails tails_;
  TruncationPolicy policy_;
  TruncationReport report_;
  double total_mass_ = 0.0;
  // First moment is precomputed so the kernel stays immutable; the outcome is
  // replayed (value, +inf, or MomentUndecidable) when first_moment() is called.
  ExtendedReal moment_{};
  bool moment_undecidable_ = false;
  std::string moment_error_;
  std::string description_;
};

}  // namespace growthlab
