#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectra/entropy.hpp"
#include "spectra/errors.hpp"

using namespace spectra;
using std::numbers::pi;

TEST_CASE("entropy functional") {
  const auto problem = assemble(potentials::counterexample(), 0.0);
  const std::vector<double> ones(problem.mesh.nodes.size(), 3.0);
  CHECK(std::abs(entropy_functional(ones, problem.mesh)) < 1e-14);

  // f^2 = 2 on half of the nodes and 0 elsewhere: Ent = log 2 under the lumped weights.
  std::vector<double> step(problem.mesh.nodes.size());
  double left = 0.0, total = 0.0;
  for (std::size_t i = 0; i < step.size(); ++i) {
    step[i] = problem.mesh.nodes[i] < 0.0 ? std::sqrt(2.0) : 0.0;
    total += problem.mesh.node_weights[i];
    if (problem.mesh.nodes[i] < 0.0) left += problem.mesh.node_weights[i];
  }
  const double p = left / total;
  const double m = 2.0 * p;
  CHECK(entropy_functional(step, problem.mesh) == doctest::Approx(2.0 * p * std::log(2.0) - m * std::log(m)));
}

TEST_CASE("Rayleigh quotient of a small perturbation approaches C_P") {
  const auto problem = assemble(potentials::counterexample(), 0.0);
  std::vector<double> f(problem.mesh.nodes.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 + 1e-3 * std::sin(problem.mesh.nodes[i]);
  CHECK(lsi_rayleigh(f, problem.mesh, problem.stiffness) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("Gaussian log-Sobolev constant") {
  for (double t : {1.0, 0.01}) {
    const auto r = lsi_constant(potentials::gaussian(), t);
    CHECK(r.c_ls / t == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.lower_bound >= r.c_p);
    CHECK(r.lower_bound <= r.upper_bound);
  }
}

TEST_CASE("counterexample potential: lower bound sits above C_P and below the Rothaus bound") {
  const double t = 1e-3;
  const auto r = lsi_constant(potentials::counterexample(), t);
  CHECK(r.lower_bound >= r.c_p);
  CHECK(r.lower_bound <= r.upper_bound);
  CHECK((r.lower_bound - 1.0) / std::sqrt(t) == doctest::Approx(std::sqrt(8.0 / pi)).epsilon(0.06));
  CHECK(r.extremal_values.size() == r.nodes.size());
}

TEST_CASE("segment: lower bound within 1e-3 of the exact constant") {
  const auto r = lsi_constant(potentials::counterexample(), 0.0);
  CHECK(r.lower_bound == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.upper_bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.lower_bound <= r.upper_bound);
}

TEST_CASE("optimizer is deterministic for a fixed seed") {
  LsiOptions opts;
  opts.seed = 42;
  const auto a = lsi_constant(potentials::asymmetric(1.0, 4.0), 1e-3, {}, opts);
  const auto b = lsi_constant(potentials::asymmetric(1.0, 4.0), 1e-3, {}, opts);
  CHECK(a.c_ls == b.c_ls);
  CHECK(a.extremal_values == b.extremal_values);
}

TEST_CASE("Rothaus tightening and the defective inequality") {
  CHECK(rothaus_tighten(1.0, 2.0, 3.0) == 4.0);
  CHECK_THROWS_AS(rothaus_tighten(-1.0, 2.0, 3.0), InvalidInput);
  const auto d = defective_lsi_components(potentials::counterexample(), 1e-3);
  CHECK(d.a == doctest::Approx(1.0));
  CHECK(d.b > 0.0);
  const auto d2 = defective_lsi_components(potentials::counterexample(), 1e-5);
  CHECK(d2.b > d.b);
}
