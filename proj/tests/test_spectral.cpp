#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectra/quadrature.hpp"
#include "spectra/spectral.hpp"

using namespace spectra;
using std::numbers::pi;

namespace {

// Exact Poincare constants from parabolic-cylinder matching (tests/oracles).
struct Frozen {
  double t;
  double c_p;
};
constexpr Frozen kCounterexample[] = {{1e-2, 1.16619435064480},
                                      {1e-3, 1.05110761809210},
                                      {1e-4, 1.01602162162043},
                                      {1e-5, 1.00505263977612},
                                      {1e-6, 1.00159640601172}};
constexpr Frozen kAsymmetric[] = {{1e-2, 1.12340764272749}, {1e-4, 1.01200422956351}, {1e-5, 1.00378828457285}};

}  // namespace

TEST_CASE("counterexample potential matches the exact oracle") {
  for (const auto& f : kCounterexample) {
    const auto r = poincare_constant(potentials::counterexample(), f.t);
    CHECK(r.c_p == doctest::Approx(f.c_p).epsilon(1e-6));
    CHECK(r.residual <= 1e-8);
    CHECK(r.lambda1 == doctest::Approx(1.0 / r.c_p).epsilon(1e-15));
  }
}

TEST_CASE("asymmetric quadratic wings match the exact oracle") {
  for (const auto& f : kAsymmetric) {
    CHECK(poincare_constant(potentials::asymmetric(1.0, 4.0), f.t).c_p == doctest::Approx(f.c_p).epsilon(1e-6));
  }
}

TEST_CASE("Gaussian measure has C_P = t") {
  for (double t : {1.0, 0.1, 0.01}) {
    CHECK(poincare_constant(potentials::gaussian(), t).c_p / t == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(bakry_emery_bound(potentials::gaussian(), 0.3).value() == doctest::Approx(0.3));
  CHECK(!bakry_emery_bound(potentials::counterexample(), 0.3));
}

TEST_CASE("uniform segment") {
  const auto r = poincare_constant(potentials::counterexample(), 0.0);
  CHECK(r.c_p == doctest::Approx(1.0).epsilon(1e-6));
  const auto base = neumann_baseline(-1.0, 3.0);
  CHECK(base.c_p == doctest::Approx(16.0 / (pi * pi)));
  CHECK(std::abs(base.eigenfunction(1.0)) < 1e-12);
}

TEST_CASE("eigenfunction orientation and normalization") {
  const auto pot = potentials::counterexample();
  const auto problem = assemble(pot, 1e-3);
  const auto r = solve_gap(problem);
  REQUIRE(r.eigenfunction.size() == r.nodes.size());
  CHECK(r.eigenfunction.back() > r.eigenfunction.front());
  // v^T M v = Z and v is M-orthogonal to constants.
  std::vector<double> mv(r.eigenfunction.size());
  problem.mass.multiply(r.eigenfunction, mv);
  double norm = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < mv.size(); ++i) {
    norm += mv[i] * r.eigenfunction[i];
    mean += mv[i];
  }
  const double z = problem.mesh.total_weight();
  CHECK(norm == doctest::Approx(z).epsilon(1e-10));
  CHECK(std::abs(mean) < 1e-8 * z);
}

TEST_CASE("Sturm count brackets the gap") {
  const auto problem = assemble(potentials::counterexample(), 1e-2);
  const auto r = solve_gap(problem);
  CHECK(count_eigenvalues_below(problem.stiffness, problem.mass, 0.5 * r.lambda1) == 1);
  CHECK(count_eigenvalues_below(problem.stiffness, problem.mass, r.lambda1 * (1 + 1e-9)) == 2);
  CHECK(count_eigenvalues_below(problem.stiffness, problem.mass, r.lambda1 * (1 - 1e-9)) == 1);
}

TEST_CASE("Galerkin c_p grows under mesh refinement") {
  const auto pot = potentials::asymmetric(1.0, 4.0);
  GridSpec grid;
  grid.n_plateau = 200;
  grid.layer_cells_per_scale = 8;
  const auto coarse = assemble(pot, 1e-3, grid);
  const auto c0 = solve_gap(coarse).c_p;
  const auto c1 = solve_gap(assemble_on_nodes(pot, 1e-3, bisect_nodes(coarse.mesh.nodes))).c_p;
  CHECK(c1 >= c0);
}

TEST_CASE("variance bound Var(x) <= C_P") {
  for (double t : {1e-2, 1e-4}) {
    const auto pot = potentials::counterexample();
    CHECK(variance(pot, t) <= poincare_constant(pot, t).c_p);
  }
}

TEST_CASE("surrogate constant tracks C_P to o(sqrt t)") {
  const auto pot = potentials::counterexample();
  double prev = 1e9;
  for (double t : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double gap = std::abs(surrogate_constant(pot, t) - poincare_constant(pot, t).c_p) / std::sqrt(t);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("tridiagonal helpers") {
  SymTridiagonal m{{2.0, 2.0, 2.0}, {-1.0, -1.0}};
  const std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> y(3);
  m.multiply(x, y);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 4.0);
  CHECK(m.quadratic_form(x) == 12.0);
  const std::vector<double> nodes{0.0, 1.0, 3.0};
  CHECK(interpolate(nodes, x, 2.0) == 2.5);
}
