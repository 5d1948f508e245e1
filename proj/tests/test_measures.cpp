#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "growthlab/errors.hpp"
#include "growthlab/measures.hpp"

using namespace growthlab;

TEST_CASE("atom kernels: mass, moment, tau") {
  auto one = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  CHECK(one.total_mass() == doctest::Approx(1.0));
  REQUIRE(one.first_moment().is_finite());
  CHECK(one.first_moment().value == doctest::Approx(1.0));
  CHECK(one.tau() == doctest::Approx(1.0));
  CHECK(one.support() == SupportKind::DelayInterval);

  auto two = MeasureKernel::delay_atoms(1.0, {{-0.5, 0.3}, {0.0, 0.7}});
  CHECK(two.total_mass() == doctest::Approx(1.0));
  CHECK(two.first_moment().value == doctest::Approx(0.15));
}

TEST_CASE("powerlaw kernel analytic functionals") {
  auto k = MeasureKernel::powerlaw(3.0, 2.0);
  CHECK(k.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(k.first_moment().is_finite());
  CHECK(k.first_moment().value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(k.tail_mass(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k.tail_mass(1.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(k.window_mass(0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(k.partial_moment(1.0) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(k.integrated_tail(0.0) == 0.0);
  // T(t) = 1 - 1/(1+t) for this kernel
  CHECK(k.integrated_tail(1.0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(k.integrated_tail(1e5) == doctest::Approx(1.0).epsilon(1e-4));  // -> C
  CHECK_FALSE(k.truncation_report().truncated);
}

TEST_CASE("half-line atoms: open tails, closed windows, integrated tail") {
  auto k = MeasureKernel::halfline_atoms({{2.0, 1.0}});
  CHECK(k.tail_mass(1.0) == doctest::Approx(1.0));
  CHECK(k.tail_mass(2.0) == doctest::Approx(0.0));  // (t, inf) excludes the atom at t
  CHECK(k.integrated_tail(1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(k.integrated_tail(3.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(k.partial_moment(1.0) == doctest::Approx(0.0));
  CHECK(k.partial_moment(2.0) == doctest::Approx(2.0));

  auto h = MeasureKernel::halfline_atoms({{3.0, 0.5}});
  CHECK(h.window_mass(2.0, 4.0) == doctest::Approx(0.5));  // endpoints closed
  CHECK(h.window_mass(3.0, 3.0) == doctest::Approx(0.5));
  CHECK(h.window_mass_open_left(3.0, 4.0) == doctest::Approx(0.0));
  CHECK(h.tail_mass(4.0) == doctest::Approx(0.0));
  CHECK(h.window_mass(5.0, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("validation and error taxonomy") {
  CHECK_THROWS_AS(MeasureKernel::delay_atoms(1.0, {{-2.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(MeasureKernel::delay_atoms(1.0, {{-0.5, -1.0}}), ValidationError);
  CHECK_THROWS_AS(MeasureKernel::delay_atoms(1.0, {}), NonPositiveMass);
  CHECK_THROWS_AS(MeasureKernel::powerlaw(1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(MeasureKernel::powerlaw(3.0, -1.0), ValidationError);

  auto delay = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  CHECK_THROWS_AS(delay.tail_mass(0.5), WrongSupport);
  CHECK_THROWS_AS(delay.integrated_tail(1.0), WrongSupport);
  CHECK_THROWS_AS(delay.partial_moment(1.0), WrongSupport);

  auto k = MeasureKernel::powerlaw(3.0, 2.0);
  CHECK_THROWS_AS(k.window_mass(2.0, 1.0), BadWindow);
  CHECK_THROWS_AS(k.window_mass(-1.0, 1.0), BadWindow);
  CHECK_THROWS_AS(k.tau(), DomainError);
}

TEST_CASE("declared heavy tail flags an infinite first moment") {
  DensityTails tails;
  tails.mass_above = [](double t) { return 2.0 / std::sqrt(1.0 + t); };
  tails.rv_index = 1.5;
  auto k = MeasureKernel::halfline_density(
      [](double s) { return std::pow(1.0 + s, -1.5); }, tails);
  CHECK(k.total_mass() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_FALSE(k.first_moment().is_finite());
}

TEST_CASE("numeric density without tail info: truncation reported, moment undecidable") {
  TruncationPolicy policy;
  policy.s_max = 1e4;
  auto k = MeasureKernel::halfline_density(
      [](double s) { return std::pow(1.0 + s, -1.5); }, {}, policy);
  CHECK(k.truncation_report().truncated);
  CHECK(k.truncation_report().horizon == doctest::Approx(1e4));
  CHECK(k.total_mass() == doctest::Approx(2.0).epsilon(2e-2));  // numeric, tail cut
  CHECK_THROWS_AS(k.first_moment(), MomentUndecidable);
}

TEST_CASE("numeric density with fast decay converges without fuss") {
  TruncationPolicy policy;
  policy.s_max = 200.0;
  auto k = MeasureKernel::halfline_density([](double s) { return std::exp(-s); }, {}, policy);
  CHECK(k.total_mass() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(k.first_moment().value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("integrated-tail identity and monotonicity on randomized kernels") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> alpha_d(2.2, 4.0), scale_d(0.5, 3.0);
  std::uniform_real_distribution<double> loc_d(0.0, 5.0), w_d(0.1, 2.0), t_d(-1.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = alpha_d(rng), scale = scale_d(rng);
    MeasureKernel k = trial % 2 == 0
                          ? MeasureKernel::powerlaw(alpha, scale)
                          : MeasureKernel::halfline_atoms(
                                {{loc_d(rng), w_d(rng)}, {loc_d(rng), w_d(rng)}});
    for (int j = 0; j < 3; ++j) {
      const double t = std::pow(10.0, t_d(rng));
      const double T = k.integrated_tail(t);
      const double rhs = k.partial_moment(t) + t * k.tail_mass(t);
      CHECK(std::abs(T - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }
    // eps1 non-increasing, T concave-consistent, window/tail partition of M
    const double t1 = 0.7, t2 = 3.9;
    CHECK(k.tail_mass(t1) >= k.tail_mass(t2));
    CHECK(k.integrated_tail(t2) - k.integrated_tail(t1) <=
          k.tail_mass(t1) * (t2 - t1) + 1e-10);
    CHECK(k.window_mass(0.0, t1) + k.tail_mass(t1) ==
          doctest::Approx(k.total_mass()).epsilon(1e-10));
  }
}

TEST_CASE("karamata tail-moment ratio for heavy power laws") {
  for (double alpha : {1.3, 1.5, 1.7}) {
    auto k = MeasureKernel::powerlaw(alpha, 1.0);
    const double expected = 1.0 + (2.0 - alpha) / (alpha - 1.0);
    for (double t : {1e3, 1e4, 1e5}) {
      const double ratio = k.integrated_tail(t) / k.partial_moment(t);
      CHECK(ratio == doctest::Approx(expected).epsilon(0.05));
    }
  }
}

TEST_CASE("mixed atom plus density kernel is additive") {
  // k(s) = 2(1+s)^-3 plus an atom of weight 1/4 at s = 1/2.
  DensityTails tails;
  tails.mass_above = [](double t) { return std::pow(1.0 + t, -2.0); };
  tails.moment_above = [](double t) {
    const double u = 1.0 + t;
    return 2.0 / u - 1.0 / (u * u);
  };
  auto k = MeasureKernel::halfline_density([](double s) { return 2.0 * std::pow(1.0 + s, -3.0); },
                                           tails, {}, {{0.5, 0.25}});
  CHECK(k.total_mass() == doctest::Approx(1.25).epsilon(1e-10));
  CHECK(k.first_moment().value == doctest::Approx(1.125).epsilon(1e-8));
  CHECK(k.tail_mass(1.0) == doctest::Approx(0.25).epsilon(1e-10));  // atom is below the cut
  CHECK(k.window_mass(0.0, 0.5) ==
        doctest::Approx(0.25 + 1.0 - std::pow(1.5, -2.0)).epsilon(1e-8));
}
