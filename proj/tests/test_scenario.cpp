#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "growthlab/errors.hpp"
#include "growthlab/scenario.hpp"

using namespace growthlab;
namespace fs = std::filesystem;

namespace {

const char* kGoldenText = R"(# full-coverage fixture
[scenario]
name = golden
equation = fde

[nonlinearity]
kind = custom
theta = 1.5
f = sqrt(x)
f-prime = 0.5 / sqrt(x)
log-f = 0.5 * w
lambda = zero
monotone-from = 2.5
concave-from = 3.5

[kernel]
kind = delay-atoms
tau = 2
atoms = -1:0.25, -0.5:0.5, 0:0.25
density = 1 + s
alpha = 1.8
scale = 0.9
normalized = false
s-max = 500
tail-tolerance = 1e-9
rv-index = 1.8

[integration]
t-end = 64
h = 0.125
output-every = 8
density-panels = 32
x0 = 2
history = 1.5
history-times = -2, -1, 0
history-values = 1, 1.2, 1.5

[report]
extrapolation-fraction = 0.25
value-tolerance = 0.05
near-target = 0.01
movement-factor = 3
spearman-min = 0.4
override-target = 0.37
)";

ScenarioConfig minimal_ode() {
  return parse_scenario_text("[scenario]\n"
                             "name = mini\n"
                             "equation = ode\n"
                             "[nonlinearity]\n"
                             "kind = sqrt\n"
                             "[kernel]\n"
                             "kind = halfline-atoms\n"
                             "atoms = 0:1\n",
                             "mini");
}

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  return p.string();
}

}  // namespace

TEST_CASE("config parsing: full golden fixture") {
  const ScenarioConfig c = parse_scenario_text(kGoldenText, "golden");
  CHECK(c.name == "golden");
  CHECK(c.equation == "fde");
  CHECK(c.nl_kind == "custom");
  CHECK(c.theta == 1.5);
  CHECK(c.f_expr == "sqrt(x)");
  CHECK(c.f_prime_expr == "0.5 / sqrt(x)");
  CHECK(c.log_f_expr == "0.5 * w");
  CHECK(c.lambda_decl == "zero");
  CHECK(c.monotone_from == 2.5);
  REQUIRE(c.concave_from.has_value());
  CHECK(*c.concave_from == 3.5);
  CHECK(c.kernel_kind == "delay-atoms");
  CHECK(c.tau == 2.0);
  REQUIRE(c.atoms.size() == 3);
  CHECK(c.atoms[0].location == -1.0);
  CHECK(c.atoms[0].weight == 0.25);
  CHECK(c.atoms[1].location == -0.5);
  CHECK(c.atoms[1].weight == 0.5);
  CHECK(c.atoms[2].location == 0.0);
  CHECK(c.atoms[2].weight == 0.25);
  CHECK(c.density_expr == "1 + s");
  CHECK(c.alpha == 1.8);
  REQUIRE(c.scale.has_value());
  CHECK(*c.scale == 0.9);
  CHECK_FALSE(c.normalized);
  CHECK(*c.s_max == 500.0);
  CHECK(*c.tail_tolerance == 1e-9);
  CHECK(*c.rv_index == 1.8);
  CHECK(c.t_end == 64.0);
  CHECK(c.h == 0.125);
  CHECK(c.output_every == 8);
  CHECK(c.density_panels == 32);
  CHECK(c.x0 == 2.0);
  CHECK(c.history_const == 1.5);
  CHECK(c.history_times == std::vector<double>{-2.0, -1.0, 0.0});
  CHECK(c.history_values == std::vector<double>{1.0, 1.2, 1.5});
  CHECK(c.extrapolation_fraction == 0.25);
  CHECK(c.value_tolerance == 0.05);
  CHECK(c.near_target == 0.01);
  CHECK(c.movement_factor == 3.0);
  CHECK(c.spearman_min == 0.4);
  REQUIRE(c.override_target.has_value());
  CHECK(*c.override_target == 0.37);
}

TEST_CASE("config parsing: defaults for omitted keys") {
  const ScenarioConfig c = minimal_ode();
  CHECK(c.t_end == 100.0);
  CHECK(c.h == 1.0 / 32.0);
  CHECK(c.output_every == 32);
  CHECK(c.density_panels == 64);
  CHECK(c.x0 == 1.0);
  CHECK(c.history_const == 1.0);
  CHECK(c.extrapolation_fraction == 0.3);
  CHECK(c.value_tolerance == 0.1);
  CHECK(c.near_target == 0.02);
  CHECK(c.movement_factor == 2.0);
  CHECK(c.spearman_min == 0.2);
  CHECK_FALSE(c.override_target.has_value());
  CHECK_FALSE(c.scale.has_value());
}

TEST_CASE("config parsing: malformed inputs are ConfigError") {
  auto parse = [](const std::string& text) { return parse_scenario_text(text, "bad"); };
  const std::string head = "[scenario]\nname = x\nequation = ode\n"
                           "[nonlinearity]\nkind = sqrt\n[kernel]\nkind = halfline-atoms\n";
  CHECK_THROWS_AS(parse(head + "[mystery]\n"), ConfigError);
  CHECK_THROWS_AS(parse(head + "[kernel]\nwhat = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse(head + "[kernel]\ntau = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse(head + "[kernel]\nnormalized = perhaps\n"), ConfigError);
  CHECK_THROWS_AS(parse(head + "[kernel]\natoms = 0-1\n"), ConfigError);
  CHECK_THROWS_AS(parse(head + "[integration]\noutput-every = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse(head + "[integration\n"), ConfigError);
  CHECK_THROWS_AS(parse("stray = 1\n" + head), ConfigError);  // key before any section
  CHECK_THROWS_AS(parse(head + "[report]\nextrapolation-fraction = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[scenario]\nequation = ode\n"), ConfigError);  // no name
  CHECK_THROWS_AS(parse("[scenario]\nname = x\nequation = pde\n"), ConfigError);
  CHECK_THROWS_AS(parse("[scenario]\nname = x\nequation = ode\n"), ConfigError);  // no kinds
  CHECK_THROWS_AS(parse_scenario_file("no_such_file.cfg"), ConfigError);
}

TEST_CASE("verdict: value targets use the relative band") {
  VerdictTolerances tol;
  std::string reason;
  const RatioLimit target = RatioLimit::of(0.4);
  const std::vector<double> w{0.42}, f{0.42};

  CHECK(evaluate_verdict(target, 0.42, w, f, tol, reason) == Verdict::Confirmed);
  CHECK(reason.find("within") != std::string::npos);
  CHECK(evaluate_verdict(target, 0.48, w, f, tol, reason) == Verdict::Inconclusive);
  CHECK(evaluate_verdict(target, 0.80, w, f, tol, reason) == Verdict::Inconsistent);
  CHECK_THROWS_AS(evaluate_verdict(target, 0.4, {}, {}, tol, reason), ValidationError);
}

TEST_CASE("verdict: unit targets accept proximity or decisive movement") {
  VerdictTolerances tol;
  std::string reason;
  const RatioLimit unit = RatioLimit::unit();

  const std::vector<double> near{0.97, 0.98, 0.995};
  CHECK(evaluate_verdict(unit, 0.995, near, near, tol, reason) == Verdict::Confirmed);
  CHECK(reason.find("final ratio within") != std::string::npos);

  const std::vector<double> rising{0.5, 0.6, 0.7, 0.8, 0.9};
  CHECK(evaluate_verdict(unit, 0.9, rising, rising, tol, reason) == Verdict::Confirmed);
  CHECK(reason.find("gap shrank") != std::string::npos);

  const std::vector<double> falling{0.9, 0.8, 0.7, 0.6, 0.5};
  CHECK(evaluate_verdict(unit, 0.5, falling, falling, tol, reason) == Verdict::Inconsistent);

  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  CHECK(evaluate_verdict(unit, 0.5, flat, flat, tol, reason) == Verdict::Inconclusive);
}

TEST_CASE("verdict: zero targets mirror the unit logic downward") {
  VerdictTolerances tol;
  std::string reason;
  const RatioLimit zero = RatioLimit::zero();

  const std::vector<double> tiny{0.1, 0.05, 0.01};
  CHECK(evaluate_verdict(zero, 0.01, tiny, tiny, tol, reason) == Verdict::Confirmed);

  const std::vector<double> falling{0.8, 0.6, 0.45, 0.3, 0.2};
  CHECK(evaluate_verdict(zero, 0.2, falling, falling, tol, reason) == Verdict::Confirmed);
  CHECK(reason.find("shrank") != std::string::npos);

  const std::vector<double> rising{0.2, 0.3, 0.45, 0.6, 0.8};
  CHECK(evaluate_verdict(zero, 0.8, rising, rising, tol, reason) == Verdict::Inconsistent);

  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  CHECK(evaluate_verdict(zero, 0.5, flat, flat, tol, reason) == Verdict::Inconclusive);

  CHECK(evaluate_verdict(RatioLimit::indeterminate(), 0.5, flat, flat, tol, reason) ==
        Verdict::Inconclusive);
  CHECK(reason == "no theoretical prediction available");
}

TEST_CASE("factories resolve config names") {
  ScenarioConfig c = minimal_ode();
  CHECK(nonlinearity_from_config(c).name() == "sqrt");

  c.nl_kind = "example";
  c.theta = 1.0;
  CHECK(nonlinearity_from_config(c).name() == "example(1)");

  c.nl_kind = "custom";
  CHECK_THROWS_AS(nonlinearity_from_config(c), ConfigError);  // missing expressions
  c.f_expr = "sqrt(x)";
  c.f_prime_expr = "0.5 / sqrt(x)";
  c.log_f_expr = "0.5 * w";
  c.lambda_decl = "maybe";
  CHECK_THROWS_AS(nonlinearity_from_config(c), ConfigError);
  c.lambda_decl = "zero";
  CHECK(nonlinearity_from_config(c).declared_lambda()->is_zero());
  c.nl_kind = "cubic";
  CHECK_THROWS_AS(nonlinearity_from_config(c), ConfigError);

  ScenarioConfig k = minimal_ode();
  k.kernel_kind = "powerlaw";
  k.alpha = 1.9;
  CHECK_THROWS_AS(kernel_from_config(k), ConfigError);  // needs scale or normalized
  k.normalized = true;
  CHECK(kernel_from_config(k).total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  k.normalized = false;
  k.scale = 0.45;
  CHECK(kernel_from_config(k).total_mass() == doctest::Approx(0.5).epsilon(1e-10));

  k.kernel_kind = "delay-density";
  k.tau = 1.0;
  k.atoms.clear();
  CHECK_THROWS_AS(kernel_from_config(k), ConfigError);  // no density expression
  k.density_expr = "1";
  auto flat = kernel_from_config(k);
  CHECK(flat.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(flat.first_moment().value == doctest::Approx(0.5).epsilon(1e-9));

  k.kernel_kind = "conv";
  CHECK_THROWS_AS(kernel_from_config(k), ConfigError);
}

TEST_CASE("run_scenario: reference equation fixture is exact") {
  ScenarioConfig c = minimal_ode();
  c.t_end = 10.0;
  c.h = 0.25;
  c.output_every = 4;
  const std::string csv = "scenario_fixture.csv";
  const ScenarioResult res = run_scenario(c, csv);

  CHECK(res.report.r_final == 1.0);
  CHECK(res.report.r_extrapolated == 1.0);
  CHECK(res.report.verdict == Verdict::Confirmed);
  CHECK(res.report.prediction.rationale == "reference-ode");
  CHECK(res.report.target.kind == RatioLimitKind::Unit);
  CHECK(fs::exists(csv));
  fs::remove(csv);

  // fixed field order of the plain-text report
  const std::string text = res.report.text();
  const std::vector<std::string> fields{
      "scenario: ", "equation: ", "nonlinearity: ", "kernel: ", "mass: ",
      "first-moment: ", "lambda: ", "predicted-limit: ", "rationale: ", "r-final: ",
      "r-extrapolated: ", "d-final: ", "c-final: ", "spearman-r: ", "refine-sup-diff: ",
      "verdict: ", "reason: "};
  std::size_t pos = 0;
  for (const std::string& f : fields) {
    const std::size_t found = text.find(f, pos);
    REQUIRE(found != std::string::npos);
    pos = found;
  }
  CHECK(text.find("verdict: Confirmed") != std::string::npos);
}

TEST_CASE("run_scenario: an override target acts as a negative control") {
  ScenarioConfig c = minimal_ode();
  c.t_end = 10.0;
  c.h = 0.25;
  c.output_every = 4;
  c.override_target = 0.5;  // the ode trajectory sits at ratio 1 by construction
  const ScenarioResult res = run_scenario(c, "");
  CHECK(res.report.verdict == Verdict::Inconsistent);
  CHECK(res.report.text().find("target-override: 0.5") != std::string::npos);
}

TEST_CASE("predict_only reports the theory without integrating") {
  ScenarioConfig c = minimal_ode();
  c.equation = "fde";
  c.nl_kind = "example";
  c.theta = 1.0;
  c.kernel_kind = "delay-atoms";
  c.tau = 1.0;
  c.atoms = {{-1.0, 1.0}};
  const ExperimentReport rep = predict_only(c);
  REQUIRE(rep.prediction.limit.kind == RatioLimitKind::Value);
  CHECK(rep.prediction.limit.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(rep.verdict == Verdict::Inconclusive);
  CHECK(rep.reason == "prediction only; no trajectory integrated");
  CHECK(rep.text().find("refine-sup-diff: skipped") != std::string::npos);
}

TEST_CASE("run_suite: sorted rows, captured errors, csv artifacts") {
  const fs::path dir = "suite_tmp_cfg";
  const fs::path out = "suite_tmp_out";
  fs::remove_all(dir);
  fs::remove_all(out);
  fs::create_directories(dir);

  CHECK(run_suite(dir.string(), "").empty());

  write_file(dir / "b_good.cfg",
             "[scenario]\nname = suite-ok\nequation = ode\n"
             "[nonlinearity]\nkind = sqrt\n"
             "[kernel]\nkind = halfline-atoms\natoms = 0:1\n"
             "[integration]\nt-end = 5\nh = 0.25\noutput-every = 4\n");
  write_file(dir / "a_broken.cfg", "[scenario]\nname = nope\nequation = ode\nbogus = 1\n");

  const std::vector<SuiteRow> rows = run_suite(dir.string(), out.string());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].name == "a_broken");  // parse failed, falls back to the file stem
  CHECK(rows[0].failed);
  CHECK(rows[0].outcome.rfind("Error: ", 0) == 0);
  CHECK(rows[1].name == "suite-ok");
  CHECK_FALSE(rows[1].failed);
  CHECK(rows[1].outcome == "Confirmed");
  CHECK(fs::exists(out / "suite-ok.csv"));

  fs::remove_all(dir);
  fs::remove_all(out);
}
