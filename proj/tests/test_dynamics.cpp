#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "growthlab/dynamics.hpp"
#include "growthlab/errors.hpp"

using namespace growthlab;

namespace {

double closed_form_sqrt(double t, double x0) {
  // x' = sqrt(x), x(0) = x0  =>  x(t) = (sqrt(x0) + t/2)^2
  const double r = std::sqrt(x0) + 0.5 * t;
  return r * r;
}

IntegrationOptions opts(double t_end, double h, int output_every) {
  IntegrationOptions o;
  o.t_end = t_end;
  o.h = h;
  o.output_every = output_every;
  return o;
}

}  // namespace

TEST_CASE("reference equation: sqrt closed form") {
  auto n = make_sqrt();
  auto traj = integrate_ode(n, 1.0, 4.0, opts(10.0, 0.5, 2));
  REQUIRE(traj.times.size() == 11);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    CHECK(std::exp(traj.log_state[i]) ==
          doctest::Approx(closed_form_sqrt(t, 4.0)).epsilon(1e-8));
  }
  CHECK(traj.kind == EquationKind::Ode);
  CHECK(traj.scheme == "transform");
}

TEST_CASE("reference equation: ratio is exactly one when y0 = 1") {
  auto traj = integrate_ode(make_example_family(1.0), 2.0, 1.0, opts(50.0, 0.5, 10));
  for (double r : traj.ratio) CHECK(r == 1.0);
}

TEST_CASE("reference equation: log-growth scale for the theta=1 family") {
  auto traj = integrate_ode(make_example_family(1.0), 1.0, 1.0, opts(5000.0, 1.0, 500));
  const double u_end = traj.log_state.back();
  CHECK(u_end / std::sqrt(2.0 * 5000.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("reference equation argument validation") {
  auto n = make_sqrt();
  CHECK_THROWS_AS(integrate_ode(n, 0.0, 1.0, opts(10, 0.25, 1)), NonPositiveMass);
  CHECK_THROWS_AS(integrate_ode(n, 1.0, -1.0, opts(10, 0.25, 1)), ValidationError);
  CHECK_THROWS_AS(integrate_ode(n, 1.0, 1.0, opts(-10, 0.25, 1)), ValidationError);
  CHECK_THROWS_AS(integrate_ode(n, 1.0, 1.0, opts(10, 0.25, 0)), ValidationError);
}

TEST_CASE("delay equation with all mass at lag zero collapses to the ode") {
  auto n = make_sqrt();
  auto kernel = MeasureKernel::delay_atoms(1.0, {{0.0, 1.0}});
  auto psi = HistoryFunction::constant(1.0);
  auto traj = integrate_fde(n, kernel, psi, opts(20.0, 1.0 / 32.0, 32));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double x = std::exp(traj.log_state[i]);
    CHECK(std::abs(x / closed_form_sqrt(traj.times[i], 1.0) - 1.0) <= 1e-6);
  }
  // same grid as the transform-based reference
  auto ref = integrate_ode(n, 1.0, 1.0, opts(20.0, 1.0 / 32.0, 32));
  CHECK(max_log_state_gap(traj, ref) <= 1e-6);
}

TEST_CASE("delay equation with a unit lag: invariants along the trajectory") {
  auto n = make_example_family(1.0);
  auto kernel = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  auto traj = integrate_fde(n, kernel, HistoryFunction::constant(1.0),
                            opts(200.0, 1.0 / 32.0, 32));
  const double M = traj.mass;
  CHECK(M == doctest::Approx(1.0));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i], u = traj.log_state[i];
    if (i > 0) CHECK(u >= traj.log_state[i - 1] - 1e-12);  // growth never reverses
    CHECK(traj.ratio[i] <= 1.0 + 1e-3);                    // never beats the reference
    const double F = n.transform_log(u);
    CHECK(F <= M * t + 1e-6 * (1.0 + M * t));  // transform barrier
    if (std::isfinite(traj.deficit[i])) {
      const double lhs = traj.deficit[i] * n.log_f(u);
      CHECK(std::abs(lhs - (F - M * t)) <= 1e-10 * std::max(1.0, std::abs(F - M * t)));
    }
    if (std::isfinite(traj.correction[i])) {
      const double lhs = -traj.correction[i] * traj.log_ref[i];
      CHECK(std::abs(lhs - (F - M * t)) <= 1e-10 * std::max(1.0, std::abs(F - M * t)));
    }
  }
}

TEST_CASE("delay equation self-convergence at step halving") {
  auto n = make_example_family(1.0);
  auto kernel = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  auto psi = HistoryFunction::constant(1.0);
  auto run = [&](const IntegrationOptions& o) { return integrate_fde(n, kernel, psi, o); };
  auto rc = refine_check(run, opts(200.0, 1.0 / 32.0, 32));
  REQUIRE(rc.coarse.times.size() == rc.fine.times.size());
  CHECK(rc.sup_diff <= 1e-6);
}

TEST_CASE("volterra equation with an atom at zero collapses to the ode") {
  auto n = make_sqrt();
  auto kernel = MeasureKernel::halfline_atoms({{0.0, 1.0}});
  auto traj = integrate_vde(n, kernel, 1.0, opts(50.0, 1.0 / 32.0, 32));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double x = std::exp(traj.log_state[i]);
    CHECK(std::abs(x / closed_form_sqrt(traj.times[i], 1.0) - 1.0) <= 1e-6);
  }
}

TEST_CASE("volterra equation self-convergence with a power-law kernel") {
  auto n = make_example_family(1.0);
  auto kernel = MeasureKernel::powerlaw(3.0, 2.0);
  auto run = [&](const IntegrationOptions& o) { return integrate_vde(n, kernel, 1.0, o); };
  auto rc = refine_check(run, opts(100.0, 1.0 / 8.0, 8));
  CHECK(rc.sup_diff <= 1e-4);
}

TEST_CASE("overflow guard aborts runaway trajectories") {
  auto n = make_sqrt();
  auto kernel = MeasureKernel::delay_atoms(1.0, {{0.0, 50.0}});
  IntegrationOptions o = opts(100.0, 1.0 / 32.0, 32);
  o.overflow_log_limit = 5.0;
  CHECK_THROWS_AS(integrate_fde(n, kernel, HistoryFunction::constant(1.0), o), OverflowGuard);
}

TEST_CASE("step size must resolve the delay") {
  auto n = make_example_family(1.0);
  auto kernel = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  CHECK_THROWS_AS(
      integrate_fde(n, kernel, HistoryFunction::constant(1.0), opts(10.0, 1.0 / 8.0, 1)),
      StepTooLarge);
}

TEST_CASE("support mismatches are rejected") {
  auto n = make_example_family(1.0);
  auto half = MeasureKernel::powerlaw(3.0, 2.0);
  auto delay = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  CHECK_THROWS_AS(
      integrate_fde(n, half, HistoryFunction::constant(1.0), opts(10.0, 1.0 / 32.0, 1)),
      WrongSupport);
  CHECK_THROWS_AS(integrate_vde(n, delay, 1.0, opts(10.0, 1.0 / 32.0, 1)), WrongSupport);
}

TEST_CASE("history validation and interpolation") {
  CHECK_THROWS_AS(HistoryFunction::constant(0.0), NonPositiveHistory);
  CHECK_THROWS_AS(HistoryFunction::constant(-2.0), NonPositiveHistory);
  CHECK_THROWS_AS(HistoryFunction::sampled({-1.0, 0.0}, {1.0, 0.0}), NonPositiveHistory);
  CHECK_THROWS_AS(HistoryFunction::sampled({-1.0, -2.0, 0.0}, {1.0, 1.0, 1.0}),
                  ValidationError);
  CHECK_THROWS_AS(HistoryFunction::sampled({-2.0, -1.0}, {1.0, 1.0}), ValidationError);

  // exponential history = linear in log space: interpolation is exact
  std::vector<double> ts{-1.0, -0.5, 0.0}, vs(3);
  for (int i = 0; i < 3; ++i) vs[i] = std::exp(2.0 + 0.4 * ts[i]);
  auto h = HistoryFunction::sampled(ts, vs);
  CHECK(h.covers(-0.75));
  CHECK_FALSE(h.covers(-1.5));
  CHECK(h.log_at(-0.25) == doctest::Approx(2.0 + 0.4 * -0.25).epsilon(1e-12));
  CHECK(h.log_at(0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h.log_at(-2.0) == doctest::Approx(1.6).epsilon(1e-12));  // clamped
  CHECK(h.initial_log() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("trajectory csv: header and shape") {
  auto traj = integrate_ode(make_sqrt(), 1.0, 1.0, opts(5.0, 0.5, 1));
  const std::string path = "test_traj_smoke.csv";
  write_trajectory_csv(traj, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,u,log_ref,r,d,c");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == traj.times.size());
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("log-state comparison requires aligned grids") {
  auto a = integrate_ode(make_sqrt(), 1.0, 1.0, opts(5.0, 0.5, 1));
  auto b = integrate_ode(make_sqrt(), 1.0, 1.0, opts(5.0, 0.5, 2));
  CHECK_THROWS_AS(max_log_state_gap(a, b), ValidationError);
}
