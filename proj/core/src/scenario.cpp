#include "growthlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/expr.hpp"
#include "growthlab/trend.hpp"

namespace growthlab {
namespace {

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  v += 0.0;  // normalize -0
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::optional<LambdaClass> parse_lambda_decl(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "zero") return LambdaClass::zero();
  if (s == "infinite" || s == "inf") return LambdaClass::infinite();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ConfigError("lambda must be zero, infinite, or a number (got '" + s + "')");
  }
  return LambdaClass::finite(v);
}

std::vector<Atom> to_atoms(const std::vector<AtomSpec>& specs) {
  std::vector<Atom> out;
  for (const AtomSpec& a : specs) out.push_back({a.location, a.weight});
  return out;
}

TruncationPolicy policy_from(const ScenarioConfig& cfg) {
  TruncationPolicy p;
  if (cfg.s_max) p.s_max = *cfg.s_max;
  if (cfg.tail_tolerance) p.tolerance = *cfg.tail_tolerance;
  return p;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Confirmed: return "Confirmed";
    case Verdict::Inconsistent: return "Inconsistent";
    default: return "Inconclusive";
  }
}

const char* limit_kind_name(RatioLimitKind k) {
  switch (k) {
    case RatioLimitKind::Value: return "value";
    case RatioLimitKind::Unit: return "unit";
    case RatioLimitKind::Zero: return "zero";
    default: return "indeterminate";
  }
}

Nonlinearity nonlinearity_from_config(const ScenarioConfig& cfg) {
  if (cfg.nl_kind == "example") return make_example_family(cfg.theta);
  if (cfg.nl_kind == "sqrt") return make_sqrt();
  if (cfg.nl_kind == "custom") {
    if (cfg.f_expr.empty() || cfg.f_prime_expr.empty() || cfg.log_f_expr.empty()) {
      throw ConfigError("custom nonlinearity needs f, f-prime and log-f expressions");
    }
    CustomNonlinearityOptions opts;
    opts.declared_lambda = parse_lambda_decl(cfg.lambda_decl);
    opts.monotone_from = cfg.monotone_from;
    if (cfg.concave_from) opts.concave_from = *cfg.concave_from;
    return make_custom(cfg.f_expr, cfg.f_prime_expr, cfg.log_f_expr, opts);
  }
  throw ConfigError("unknown nonlinearity kind '" + cfg.nl_kind + "'");
}

MeasureKernel kernel_from_config(const ScenarioConfig& cfg) {
  if (cfg.kernel_kind == "delay-atoms") {
    return MeasureKernel::delay_atoms(cfg.tau, to_atoms(cfg.atoms));
  }
  if (cfg.kernel_kind == "delay-density") {
    if (cfg.density_expr.empty()) throw ConfigError("delay-density needs a density expression");
    Expression k = Expression::parse(cfg.density_expr, "s");
    return MeasureKernel::delay_density(cfg.tau, [k](double s) { return k.eval(s); },
                                        to_atoms(cfg.atoms));
  }
  if (cfg.kernel_kind == "halfline-atoms") {
    return MeasureKernel::halfline_atoms(to_atoms(cfg.atoms));
  }
  if (cfg.kernel_kind == "halfline-density") {
    if (cfg.density_expr.empty()) throw ConfigError("halfline-density needs a density expression");
    Expression k = Expression::parse(cfg.density_expr, "s");
    DensityTails tails;
    tails.rv_index = cfg.rv_index;
    return MeasureKernel::halfline_density([k](double s) { return k.eval(s); }, tails,
                                           policy_from(cfg), to_atoms(cfg.atoms));
  }
  if (cfg.kernel_kind == "powerlaw") {
    double scale;
    if (cfg.normalized) {
      scale = cfg.alpha - 1.0;  // total mass scale/(alpha-1) becomes 1
    } else if (cfg.scale) {
      scale = *cfg.scale;
    } else {
      throw ConfigError("powerlaw kernel needs either scale or normalized = true");
    }
    return MeasureKernel::powerlaw(cfg.alpha, scale, policy_from(cfg));
  }
  throw ConfigError("unknown kernel kind '" + cfg.kernel_kind + "'");
}

Verdict evaluate_verdict(const RatioLimit& target, double r_extrapolated,
                         const std::vector<double>& window_r, const std::vector<double>& full_r,
                         const VerdictTolerances& tol, std::string& reason) {
  if (full_r.empty() || window_r.empty()) throw ValidationError("verdict needs ratio samples");
  const double r_final = full_r.back();

  if (target.kind == RatioLimitKind::Value) {
    const double v = target.value;
    if (!(v > 0.0)) throw ValidationError("Value target must be positive");
    const double rel = std::abs(r_extrapolated - v) / v;
    if (rel <= tol.value_rel) {
      reason = "extrapolated ratio within " + fmt(100.0 * tol.value_rel, "%.3g") +
               "% of the predicted value";
      return Verdict::Confirmed;
    }
    if (rel <= 2.5 * tol.value_rel) {
      reason = "extrapolated ratio near but outside tolerance (relative error " +
               fmt(rel, "%.3g") + ")";
      return Verdict::Inconclusive;
    }
    reason = "extrapolated ratio far from the predicted value (relative error " +
             fmt(rel, "%.3g") + ")";
    return Verdict::Inconsistent;
  }

  if (target.kind == RatioLimitKind::Indeterminate) {
    reason = "no theoretical prediction available";
    return Verdict::Inconclusive;
  }

  const double rho = spearman_rho(window_r);
  const double tiny = 1e-300;
  if (target.kind == RatioLimitKind::Unit) {
    const double gap_final = std::max(0.0, 1.0 - r_final);
    if (gap_final <= tol.near_target) {
      reason = "final ratio within " + fmt(tol.near_target, "%.3g") + " of 1";
      return Verdict::Confirmed;
    }
    double gap_max = 0.0, gap_min = std::numeric_limits<double>::infinity();
    for (double r : full_r) {
      const double g = std::max(0.0, 1.0 - r);
      gap_max = std::max(gap_max, g);
      gap_min = std::min(gap_min, g);
    }
    if (rho >= tol.spearman_min && gap_max / std::max(gap_final, tiny) >= tol.movement_factor) {
      reason = "ratio increasing toward 1 (rank correlation " + fmt(rho, "%.3g") +
               ", gap shrank by " + fmt(gap_max / std::max(gap_final, tiny), "%.3g") + "x)";
      return Verdict::Confirmed;
    }
    if (rho <= -tol.spearman_min &&
        gap_final / std::max(gap_min, tiny) >= tol.movement_factor) {
      reason = "ratio moving away from 1 (rank correlation " + fmt(rho, "%.3g") + ")";
      return Verdict::Inconsistent;
    }
    reason = "trend toward 1 not decisive (rank correlation " + fmt(rho, "%.3g") + ")";
    return Verdict::Inconclusive;
  }

  // Zero target.
  if (r_final <= tol.near_target) {
    reason = "final ratio within " + fmt(tol.near_target, "%.3g") + " of 0";
    return Verdict::Confirmed;
  }
  double r_max = 0.0, r_min = std::numeric_limits<double>::infinity();
  for (double r : full_r) {
    r_max = std::max(r_max, r);
    r_min = std::min(r_min, r);
  }
  if (rho <= -tol.spearman_min && r_max / std::max(r_final, tiny) >= tol.movement_factor) {
    reason = "ratio decreasing toward 0 (rank correlation " + fmt(rho, "%.3g") +
             ", shrank by " + fmt(r_max / std::max(r_final, tiny), "%.3g") + "x)";
    return Verdict::Confirmed;
  }
  if (rho >= tol.spearman_min && r_final / std::max(r_min, tiny) >= tol.movement_factor) {
    reason = "ratio increasing away from 0 (rank correlation " + fmt(rho, "%.3g") + ")";
    return Verdict::Inconsistent;
  }
  reason = "trend toward 0 not decisive (rank correlation " + fmt(rho, "%.3g") + ")";
  return Verdict::Inconclusive;
}

namespace {

ExperimentReport build_report(const ScenarioConfig& cfg, const Nonlinearity& n,
                              const MeasureKernel& kernel, const Trajectory* traj) {
  ExperimentReport rep;
  rep.scenario = cfg.name;
  rep.equation = cfg.equation;
  rep.nonlinearity = n.name();
  rep.kernel = kernel.describe();
  if (cfg.equation == "ode") {
    rep.prediction.lambda = n.effective_lambda();
    rep.prediction.mass = kernel.total_mass();
    rep.prediction.first_moment = kernel.first_moment();
    rep.prediction.limit = RatioLimit::unit();
    rep.prediction.rationale = "reference-ode";
  } else {
    rep.prediction = predict(n, kernel);
  }
  rep.target = cfg.override_target ? RatioLimit::of(*cfg.override_target) : rep.prediction.limit;

  if (traj) {
    const std::vector<double>& r = traj->ratio;
    const std::size_t size = r.size();
    std::size_t start = static_cast<std::size_t>(
        std::floor(size * (1.0 - cfg.extrapolation_fraction)));
    if (start >= size) start = size - 1;
    const std::vector<double> window(r.begin() + start, r.end());
    rep.r_final = r.back();
    rep.r_extrapolated = fit_power_tail(traj->times, r).limit;
    rep.d_final = traj->deficit.back();
    rep.c_final = traj->correction.back();
    rep.spearman_r = spearman_rho(window);
    VerdictTolerances tol;
    tol.value_rel = cfg.value_tolerance;
    tol.near_target = cfg.near_target;
    tol.movement_factor = cfg.movement_factor;
    tol.spearman_min = cfg.spearman_min;
    rep.verdict = evaluate_verdict(rep.target, rep.r_extrapolated, window, r, tol, rep.reason);
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "prediction only; no trajectory integrated";
  }
  return rep;
}

}  // namespace

std::string ExperimentReport::text() const {
  std::string out;
  out += "scenario: " + scenario + "\n";
  out += "equation: " + equation + "\n";
  out += "nonlinearity: " + nonlinearity + "\n";
  out += "kernel: " + kernel + "\n";
  out += "mass: " + fmt(prediction.mass) + "\n";
  out += "first-moment: " +
         (prediction.first_moment.is_finite() ? fmt(prediction.first_moment.value)
                                              : std::string("infinite")) +
         "\n";
  switch (prediction.lambda.kind) {
    case LambdaKind::Zero: out += "lambda: zero\n"; break;
    case LambdaKind::Infinite: out += "lambda: infinite\n"; break;
    case LambdaKind::Finite: out += "lambda: finite " + fmt(prediction.lambda.value) + "\n"; break;
  }
  out += "predicted-limit: " + std::string(limit_kind_name(prediction.limit.kind));
  if (prediction.limit.kind == RatioLimitKind::Value) out += " " + fmt(prediction.limit.value);
  out += "\n";
  out += "rationale: " + prediction.rationale + "\n";
  if (target.kind == RatioLimitKind::Value &&
      (prediction.limit.kind != RatioLimitKind::Value ||
       prediction.limit.value != target.value)) {
    out += "target-override: " + fmt(target.value) + "\n";
  }
  out += "r-final: " + fmt(r_final) + "\n";
  out += "r-extrapolated: " + fmt(r_extrapolated) + "\n";
  out += "d-final: " + fmt(d_final) + "\n";
  out += "c-final: " + fmt(c_final) + "\n";
  out += "spearman-r: " + fmt(spearman_r, "%.6g") + "\n";
  out += "refine-sup-diff: " + (refine_sup ? fmt(*refine_sup, "%.6g") : std::string("skipped")) +
         "\n";
  out += "verdict: " + std::string(verdict_name(verdict)) + "\n";
  out += "reason: " + reason + "\n";
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::string& csv_path) {
  const Nonlinearity n = nonlinearity_from_config(cfg);
  const MeasureKernel kernel = kernel_from_config(cfg);

  IntegrationOptions opt;
  opt.t_end = cfg.t_end;
  opt.h = cfg.h;
  opt.output_every = cfg.output_every;
  opt.density_panels = cfg.density_panels;

  ScenarioResult out;
  if (cfg.equation == "ode") {
    out.trajectory = integrate_ode(n, kernel.total_mass(), cfg.x0, opt);
  } else if (cfg.equation == "fde") {
    HistoryFunction psi = cfg.history_times.empty()
                              ? HistoryFunction::constant(cfg.history_const)
                              : HistoryFunction::sampled(cfg.history_times, cfg.history_values);
    out.trajectory = integrate_fde(n, kernel, psi, opt);
  } else {
    out.trajectory = integrate_vde(n, kernel, cfg.x0, opt);
  }
  out.report = build_report(cfg, n, kernel, &out.trajectory);
  if (!csv_path.empty()) write_trajectory_csv(out.trajectory, csv_path);
  return out;
}

ExperimentReport predict_only(const ScenarioConfig& cfg) {
  const Nonlinearity n = nonlinearity_from_config(cfg);
  const MeasureKernel kernel = kernel_from_config(cfg);
  return build_report(cfg, n, kernel, nullptr);
}

std::vector<SuiteRow> run_suite(const std::string& dir, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<SuiteRow> rows;
  for (const fs::path& p : files) {
    SuiteRow row;
    row.name = p.stem().string();
    try {
      const ScenarioConfig cfg = parse_scenario_file(p.string());
      row.name = cfg.name;
      std::string csv;
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        csv = (fs::path(out_dir) / (cfg.name + ".csv")).string();
      }
      const ScenarioResult res = run_scenario(cfg, csv);
      row.outcome = verdict_name(res.report.verdict);
      row.failed = res.report.verdict == Verdict::Inconsistent;
    } catch (const std::exception& e) {
      row.outcome = std::string("Error: ") + e.what();
      row.failed = true;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace growthlab
