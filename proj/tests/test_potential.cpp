#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spectra/errors.hpp"
#include "spectra/potential.hpp"

using namespace spectra;
using std::numbers::pi;

TEST_CASE("eval on the counterexample potential") {
  const auto pot = potentials::counterexample();
  CHECK(pot.eval(0.0) == 0.0);
  CHECK(pot.eval(pi / 2 + 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pot.eval(-pi / 2 - 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pot.eval_hess(pi / 2) == 1.0);
  CHECK(pot.eval_hess(-pi / 2) == 1.0);
  CHECK(pot.eval_hess(0.3) == 0.0);
  CHECK(pot.eval_grad(pi / 2 + 0.5) == doctest::Approx(0.5));
  CHECK(pot.eval_grad(-pi / 2 - 0.5) == doctest::Approx(-0.5));
}

TEST_CASE("eval is zero exactly on the plateau") {
  const auto pot = potentials::asymmetric(1.0, 4.0);
  for (double x : {-pi / 2, -1.0, 0.0, 1.2, pi / 2}) CHECK(pot.eval(x) == 0.0);
  for (double x : {-pi / 2 - 1e-9, pi / 2 + 1e-9, 5.0}) CHECK(pot.eval(x) > 0.0);
}

TEST_CASE("eval_grad matches central differences away from the junctions") {
  const PiecewisePotential pots[] = {potentials::counterexample(), potentials::quartic(),
                                     PiecewisePotential(-1.0, 0.5, WingSpec::series({{0.5, 2.0}, {1.0, 3.0}}),
                                                        WingSpec::power(3.0, 1.5))};
  std::mt19937_64 rng(4);
  for (const auto& pot : pots) {
    std::uniform_real_distribution<double> d(pot.plateau_left() - 3.0, pot.plateau_right() + 3.0);
    for (int i = 0; i < 200; ++i) {
      const double x = d(rng);
      if (std::abs(x - pot.plateau_left()) < 1e-3 || std::abs(x - pot.plateau_right()) < 1e-3) continue;
      const double h = 1e-6;
      const double fd = (pot.eval(x + h) - pot.eval(x - h)) / (2 * h);
      CHECK(std::abs(fd - pot.eval_grad(x)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("sampled convexity") {
  const auto pot = potentials::quartic();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-4.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    double a = d(rng), b = d(rng), c = d(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (c - a < 1e-9) continue;
    const double chord = ((c - b) * pot.eval(a) + (b - a) * pot.eval(c)) / (c - a);
    CHECK(pot.eval(b) <= chord + 1e-12 * std::max(1.0, chord));
  }
}

TEST_CASE("wing series are normalized") {
  const auto w = WingSpec::series({{1.0, 3.0}, {0.5, 2.0}, {0.25, 2.0}});
  REQUIRE(w.terms().size() == 2);
  CHECK(w.exponent() == 2.0);
  CHECK(w.coefficient() == 0.75);
  CHECK(w.boundary_coefficient() == doctest::Approx(1.0 / 0.75));
  CHECK(w.junction_curvature().value() == doctest::Approx(1.5));
  CHECK(w.value(w.inverse(2.0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(!WingSpec::power(1.0, 4.0).junction_curvature());
  CHECK_THROWS_AS(WingSpec::power(-1.0, 2.0), InvalidInput);
}

TEST_CASE("PL constant") {
  CHECK(pl_constant(potentials::gaussian(), 10.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pl_constant(potentials::counterexample(), 10.0) == doctest::Approx(0.5).epsilon(1e-12));
  const PiecewisePotential p4(-1.0, 1.0, WingSpec::power(1.0, 4.0), WingSpec::power(1.0, 4.0));
  CHECK(pl_constant(p4, PlWindow{0.01, 10.0}) == doctest::Approx(625.0).epsilon(1e-9));
  const PiecewisePotential p15(-1.0, 1.0, WingSpec::power(1.0, 1.5), WingSpec::power(1.0, 1.5));
  CHECK_THROWS_AS(pl_constant(p15, PlWindow{0.01, std::numeric_limits<double>::infinity()}), PlDivergence);
}

TEST_CASE("quadratic growth") {
  std::vector<double> xs;
  for (int i = 0; i <= 400; ++i) xs.push_back(-5.0 + 0.025 * i);
  CHECK(quadratic_growth_check(potentials::gaussian(), 0.5, xs).holds);
  CHECK(quadratic_growth_check(potentials::counterexample(), 0.5, xs).holds);
  const auto bad = quadratic_growth_check(potentials::counterexample(), 0.1, xs);
  CHECK(!bad.holds);
  CHECK(std::abs(bad.worst_x) > pi / 2);
}

TEST_CASE("gradient-flow decay") {
  CHECK(gradient_flow_decay_check(potentials::gaussian(), 0.5, 3.0, 5.0, 1e-3));
  CHECK(gradient_flow_decay_check(potentials::counterexample(), 0.5, 3.0, 5.0, 1e-3));
  CHECK(gradient_flow_decay_check(potentials::counterexample(), 0.5, 0.1, 5.0, 1e-3));
  CHECK_THROWS_AS(gradient_flow_decay_check(potentials::gaussian(), 0.5, 3.0, 5.0, 0.5), InvalidInput);

  const auto pot = potentials::counterexample();
  const double c = pl_constant(pot, 10.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> d(-pi / 2 - 10.0, pi / 2 + 10.0);
  for (int i = 0; i < 100; ++i) CHECK(gradient_flow_decay_check(pot, c, d(rng), 3.0, 1e-3));
}

TEST_CASE("assumption report") {
  CHECK(all_passed(validate_assumptions(potentials::counterexample())));
  const PiecewisePotential half(-1.0, 1.0, WingSpec::power(1.0, 0.5), WingSpec::power(1.0, 2.0));
  bool alpha_failed = false;
  for (const auto& c : validate_assumptions(half)) {
    if (c.name == "α ≥ 1" && !c.passed) alpha_failed = true;
  }
  CHECK(alpha_failed);
  const PiecewisePotential steep(-1.0, 1.0, WingSpec::power(1.0, 4.0, 1.5), WingSpec::power(1.0, 4.0, 1.5));
  bool beta_failed = false;
  for (const auto& c : validate_assumptions(steep)) {
    if (c.name == "α < 2β" && !c.passed) beta_failed = true;
  }
  CHECK(beta_failed);
}
