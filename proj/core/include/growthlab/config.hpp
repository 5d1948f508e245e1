#pragma once

#include <optional>
#include <string>
#include <vector>

namespace growthlab {

struct AtomSpec {
  double location = 0.0;
  double weight = 0.0;
};

// Parsed scenario file. Sections: [scenario], [nonlinearity], [kernel],
// [integration], [report]. Unknown sections or keys are ConfigError.
struct ScenarioConfig {
  // [scenario]
  std::string name;
  std::string equation;  // ode | fde | vde

  // [nonlinearity]
  std::string nl_kind;  // example | sqrt | custom
  double theta = 0.0;
  std::string f_expr, f_prime_expr, log_f_expr;
  std::string lambda_decl;  // "", "zero", "infinite", or a number
  double monotone_from = 0.0;
  std::optional<double> concave_from;

  // [kernel]
  std::string kernel_kind;  // delay-atoms | delay-density | halfline-atoms |
                            // halfline-density | powerlaw
  double tau = 0.0;
  std::vector<AtomSpec> atoms;
  std::string density_expr;  // expression in s
  double alpha = 0.0;
  std::optional<double> scale;
  bool normalized = false;
  std::optional<double> s_max, tail_tolerance, rv_index;

  // [integration]
  double t_end = 100.0;
  double h = 1.0 / 32.0;
  int output_every = 32;
  int density_panels = 64;
  double x0 = 1.0;
  double history_const = 1.0;
  std::vector<double> history_times, history_values;

  // [report]
  double extrapolation_fraction = 0.3;
  double value_tolerance = 0.1;
  double near_target = 0.02;
  double movement_factor = 2.0;
  double spearman_min = 0.2;
  std::optional<double> override_target;
};

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin);
ScenarioConfig parse_scenario_file(const std::string& path);

}  // namespace growthlab
