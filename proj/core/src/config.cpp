#include "growthlab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "growthlab/errors.hpp"

namespace growthlab {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct Cursor {
  const std::string& origin;
  int line;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_num(const Cursor& at, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) at.fail("expected a number, got '" + v + "'");
  return x;
}

int parse_int(const Cursor& at, const std::string& v) {
  const double x = parse_num(at, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) at.fail("expected an integer, got '" + v + "'");
  return i;
}

bool parse_bool(const Cursor& at, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  at.fail("expected a boolean, got '" + v + "'");
}

std::vector<double> parse_list(const Cursor& at, const std::string& v) {
  std::vector<double> out;
  for (const std::string& part : split(v, ',')) out.push_back(parse_num(at, part));
  return out;
}

std::vector<AtomSpec> parse_atoms(const Cursor& at, const std::string& v) {
  std::vector<AtomSpec> out;
  for (const std::string& part : split(v, ',')) {
    const auto pieces = split(part, ':');
    if (pieces.size() != 2) at.fail("atom entries must look like location:weight");
    out.push_back({parse_num(at, pieces[0]), parse_num(at, pieces[1])});
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  Cursor at{origin, 0};
  bool saw_scenario = false;

  while (std::getline(in, raw)) {
    ++at.line;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "nonlinearity" && section != "kernel" &&
          section != "integration" && section != "report") {
        at.fail("unknown section [" + section + "]");
      }
      if (section == "scenario") saw_scenario = true;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) at.fail("key '" + key + "' outside any section");

    if (section == "scenario") {
      if (key == "name") cfg.name = value;
      else if (key == "equation") cfg.equation = value;
      else at.fail("unknown key '" + key + "' in [scenario]");
    } else if (section == "nonlinearity") {
      if (key == "kind") cfg.nl_kind = value;
      else if (key == "theta") cfg.theta = parse_num(at, value);
      else if (key == "f") cfg.f_expr = value;
      else if (key == "f-prime") cfg.f_prime_expr = value;
      else if (key == "log-f") cfg.log_f_expr = value;
      else if (key == "lambda") cfg.lambda_decl = value;
      else if (key == "monotone-from") cfg.monotone_from = parse_num(at, value);
      else if (key == "concave-from") cfg.concave_from = parse_num(at, value);
      else at.fail("unknown key '" + key + "' in [nonlinearity]");
    } else if (section == "kernel") {
      if (key == "kind") cfg.kernel_kind = value;
      else if (key == "tau") cfg.tau = parse_num(at, value);
      else if (key == "atoms") cfg.atoms = parse_atoms(at, value);
      else if (key == "density") cfg.density_expr = value;
      else if (key == "alpha") cfg.alpha = parse_num(at, value);
      else if (key == "scale") cfg.scale = parse_num(at, value);
      else if (key == "normalized") cfg.normalized = parse_bool(at, value);
      else if (key == "s-max") cfg.s_max = parse_num(at, value);
      else if (key == "tail-tolerance") cfg.tail_tolerance = parse_num(at, value);
      else if (key == "rv-index") cfg.rv_index = parse_num(at, value);
      else at.fail("unknown key '" + key + "' in [kernel]");
    } else if (section == "integration") {
      if (key == "t-end") cfg.t_end = parse_num(at, value);
      else if (key == "h") cfg.h = parse_num(at, value);
      else if (key == "output-every") cfg.output_every = parse_int(at, value);
      else if (key == "density-panels") cfg.density_panels = parse_int(at, value);
      else if (key == "x0") cfg.x0 = parse_num(at, value);
      else if (key == "history") cfg.history_const = parse_num(at, value);
      else if (key == "history-times") cfg.history_times = parse_list(at, value);
      else if (key == "history-values") cfg.history_values = parse_list(at, value);
      else at.fail("unknown key '" + key + "' in [integration]");
    } else {  // report
      if (key == "extrapolation-fraction") cfg.extrapolation_fraction = parse_num(at, value);
      else if (key == "value-tolerance") cfg.value_tolerance = parse_num(at, value);
      else if (key == "near-target") cfg.near_target = parse_num(at, value);
      else if (key == "movement-factor") cfg.movement_factor = parse_num(at, value);
      else if (key == "spearman-min") cfg.spearman_min = parse_num(at, value);
      else if (key == "override-target") cfg.override_target = parse_num(at, value);
      else at.fail("unknown key '" + key + "' in [report]");
    }
  }

  at.line = 0;
  if (!saw_scenario) at.fail("missing [scenario] section");
  if (cfg.name.empty()) at.fail("missing scenario name");
  if (cfg.equation != "ode" && cfg.equation != "fde" && cfg.equation != "vde") {
    at.fail("equation must be ode, fde or vde (got '" + cfg.equation + "')");
  }
  if (cfg.nl_kind.empty()) at.fail("missing nonlinearity kind");
  if (cfg.kernel_kind.empty()) at.fail("missing kernel kind");
  if (!(cfg.t_end > 0.0) || !(cfg.h > 0.0)) at.fail("t-end and h must be positive");
  if (cfg.output_every < 1) at.fail("output-every must be >= 1");
  if (!(cfg.extrapolation_fraction > 0.0) || cfg.extrapolation_fraction >= 1.0) {
    at.fail("extrapolation-fraction must lie in (0, 1)");
  }
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace growthlab
