#pragma once

// Poincaré constants as inverse spectral gaps of the weighted Neumann problem
//   -(w u')' = lambda w u,   w = exp(-V/t),
// discretized with P1 finite elements on the boundary-layer mesh.

#include <functional>
#include <optional>
#include <vector>

#include "spectra/potential.hpp"
#include "spectra/quadrature.hpp"

namespace spectra {

struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i + 1

  std::size_t size() const { return diag.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
  double quadratic_form(std::span<const double> x) const;
};

struct WeightedMesh {
  std::vector<double> nodes;
  std::vector<double> cell_weights;  // integral of exp(-V/t) over each cell
  std::vector<double> node_weights;  // lumped masses (row sums of the mass matrix)

  double total_weight() const;
};

struct Assembly {
  SymTridiagonal stiffness;  // int phi_i' phi_j' w
  SymTridiagonal mass;       // int phi_i phi_j w (Galerkin)
  WeightedMesh mesh;
  // Gauss-Legendre points (GibbsRule::kOrder per cell) and Gibbs-weighted
  // quadrature weights used for the assembly.
  std::vector<double> quad_points;
  std::vector<double> quad_weights;
};

Assembly assemble(const PiecewisePotential& pot, double t, const GridSpec& grid = {});
Assembly assemble_on_nodes(const PiecewisePotential& pot, double t, std::vector<double> nodes);

/// Number of generalized eigenvalues of (K, M) strictly below sigma (Sylvester inertia).
int count_eigenvalues_below(const SymTridiagonal& k, const SymTridiagonal& m, double sigma);

struct SpectralResult {
  double lambda1;
  double c_p;
  std::vector<double> nodes;
  std::vector<double> eigenfunction;  // mean 0, unit L2(mu_t) norm, increasing through b
  double residual;                    // |K v - lambda M v| / |M v|
  int mesh_size;
};

/// Smallest nonzero generalized eigenpair of an assembled problem.
SpectralResult solve_gap(const Assembly& problem);

SpectralResult poincare_constant(const PiecewisePotential& pot, double t, const GridSpec& grid = {});

struct NeumannBaseline {
  double c_p;
  std::function<double(double)> eigenfunction;
};
NeumannBaseline neumann_baseline(double a, double b);

/// sup over g on [a, b] with int_a^b g = 0 of
///   (int g^2 + sqrt(pi t/2)(g(a)^2/sqrt(kappa_a) + g(b)^2/sqrt(kappa_b))) / int g'^2.
double surrogate_constant(const PiecewisePotential& pot, double t, const GridSpec& grid = {});

/// t / inf V'' when V is uniformly convex (single minimizer, quadratic-led wings).
std::optional<double> bakry_emery_bound(const PiecewisePotential& pot, double t);

/// Piecewise-linear interpolation of nodal values.
double interpolate(std::span<const double> nodes, std::span<const double> values, double x);

}  // namespace spectra
