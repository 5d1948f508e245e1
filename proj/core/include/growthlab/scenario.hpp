#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthlab/asymptotics.hpp"
#include "growthlab/config.hpp"
#include "growthlab/dynamics.hpp"

namespace growthlab {

enum class Verdict { Confirmed, Inconsistent, Inconclusive };

struct VerdictTolerances {
  double value_rel = 0.1;       // relative tolerance against a Value target
  double near_target = 0.02;    // |final - target| treated as already converged
  double movement_factor = 2.0; // required total movement toward a Unit/Zero target
  double spearman_min = 0.2;    // required rank-correlation magnitude over the window
};

struct ExperimentReport {
  std::string scenario, equation, nonlinearity, kernel;
  AsymptoticPrediction prediction;
  RatioLimit target;  // prediction.limit unless overridden in config
  double r_final = 0.0;
  double r_extrapolated = 0.0;
  double d_final = 0.0;
  double c_final = 0.0;
  double spearman_r = 0.0;
  std::optional<double> refine_sup;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;

  std::string text() const;  // plain-text block with fixed field order
};

const char* verdict_name(Verdict v);
const char* limit_kind_name(RatioLimitKind k);

// Pure verdict function: compares the extrapolated ratio and the trend of the
// ratio series against the predicted limit.
Verdict evaluate_verdict(const RatioLimit& target, double r_extrapolated,
                         const std::vector<double>& window_r, const std::vector<double>& full_r,
                         const VerdictTolerances& tol, std::string& reason);

Nonlinearity nonlinearity_from_config(const ScenarioConfig& cfg);
MeasureKernel kernel_from_config(const ScenarioConfig& cfg);

struct ScenarioResult {
  ExperimentReport report;
  Trajectory trajectory;
};

// Integrates the configured equation, predicts the limit, evaluates the
// verdict; writes the trajectory CSV when csv_path is non-empty.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::string& csv_path);

// Prediction only (no integration); used by the CLI `predict` command.
ExperimentReport predict_only(const ScenarioConfig& cfg);

struct SuiteRow {
  std::string name;
  std::string outcome;  // verdict name or "Error: ..."
  bool failed = false;  // Inconsistent verdict or error
};

// Runs every *.cfg under dir in sorted order; trajectory CSVs are written to
// out_dir when non-empty. Per-scenario errors are captured, not propagated.
std::vector<SuiteRow> run_suite(const std::string& dir, const std::string& out_dir);

}  // namespace growthlab
