#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectra/errors.hpp"
#include "spectra/quadrature.hpp"

using namespace spectra;
using std::numbers::pi;

TEST_CASE("mesh shape") {
  const auto pot = potentials::counterexample();
  GridSpec grid;
  const auto plateau_only = build_nodes(pot, 0.0, grid);
  CHECK(plateau_only.size() == static_cast<std::size_t>(grid.n_plateau + 1));
  CHECK(plateau_only.front() == -pi / 2);
  CHECK(plateau_only.back() == pi / 2);

  const double t = 1e-4;
  const auto nodes = build_nodes(pot, t, grid);
  for (std::size_t i = 1; i < nodes.size(); ++i) REQUIRE(nodes[i] > nodes[i - 1]);
  const double r = truncation_radius(pot.right_wing(), t, grid.truncation_threshold);
  CHECK(pot.right_wing().value(r) / t == doctest::Approx(grid.truncation_threshold));
  CHECK(nodes.back() == doctest::Approx(pi / 2 + r));
  CHECK(layer_scale(pot.right_wing(), t) == doctest::Approx(std::sqrt(2 * t)));

  const auto fine = bisect_nodes(nodes);
  CHECK(fine.size() == 2 * nodes.size() - 1);

  grid.n_plateau = 0;
  CHECK_THROWS_AS(grid.validate(), InvalidInput);
}

TEST_CASE("partition function against closed forms") {
  const auto cx = potentials::counterexample();
  const auto quartic = potentials::quartic();
  const auto gauss = potentials::gaussian();
  for (double t : {1e-2, 1e-4, 1e-6}) {
    CHECK(partition_function(cx, t) == doctest::Approx(pi + std::sqrt(2 * pi * t)).epsilon(1e-12));
    CHECK(partition_function(quartic, t) ==
          doctest::Approx(pi + 2 * std::tgamma(1.25) * std::pow(t, 0.25)).epsilon(1e-12));
    CHECK(partition_function(gauss, t) == doctest::Approx(std::sqrt(2 * pi * t)).epsilon(1e-12));
  }
  CHECK(partition_function(cx, 0.01) == doctest::Approx(3.392255481053).epsilon(1e-12));
  const auto est = partition_function_estimate(cx, 1e-3);
  CHECK(est.relative_error < 1e-12);
}

TEST_CASE("Z expansion") {
  const auto z = z_expansion(potentials::counterexample());
  CHECK(z.gamma == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-14));
  CHECK(z.exponent == 0.5);
  const auto q = z_expansion(potentials::quartic());
  CHECK(q.gamma == doctest::Approx(2 * std::tgamma(1.25)).epsilon(1e-14));
  CHECK(q.exponent == 0.25);
}

TEST_CASE("moments") {
  CHECK(std::abs(mean(potentials::counterexample(), 1e-3)) < 1e-14);
  CHECK(variance(potentials::gaussian(), 0.1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(weighted_moment(potentials::counterexample(), 1e-2, [](double) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boundary measures weight sides by kappa^(-1/2)") {
  const auto pot = potentials::asymmetric(1.0, 4.0);
  for (double t : {1e-2, 1e-5}) {
    const auto s = boundary_measure_sigma_t(pot, t);
    CHECK(s.weight_left == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.weight_left + s.weight_right == doctest::Approx(1.0));
  }
  const auto lim = limiting_sigma(pot);
  CHECK(lim.weight_left == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  const auto sym = limiting_sigma(potentials::counterexample());
  CHECK(sym.weight_left == doctest::Approx(0.5));
}

TEST_CASE("mean-control inequality") {
  const auto one = [](double) { return 1.0; };
  const auto zero = [](double) { return 0.0; };
  const auto terms = boundary_mean_control_terms(one, zero, 1e-3, 0.5);
  CHECK(std::abs(terms.lhs) < 1e-12);

  // g = 1 + c x with c sqrt(t) = 0.3: fine with the proof constants, violated
  // by the tighter display constants.
  const double t = 1e-2;
  const double c = 0.3 / std::sqrt(t);
  const auto g = [c](double x) { return 1.0 + c * x; };
  const auto gp = [c](double) { return c; };
  CHECK(boundary_mean_control_check(g, gp, t, 0.5, MeanControlConstants::proof));
  CHECK(!boundary_mean_control_check(g, gp, t, 0.5, MeanControlConstants::display));

  const auto wing = potentials::counterexample().right_wing();
  CHECK(generalized_mean_control_check(wing, t, t, g, gp, 0.5));
}
