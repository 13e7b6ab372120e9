#pragma once

// Log-Sobolev constants: Ent(f^2) <= 2 C int f'^2 dmu, estimated from below by
// maximizing the Rayleigh quotient over nodal functions and from above by the
// Rothaus tightening of a defective inequality.

#include <cstdint>
#include <string>
#include <vector>

#include "spectra/spectral.hpp"

namespace spectra {

/// Ent_mu(f^2) with mu given by the lumped node weights of the mesh.
double entropy_functional(std::span<const double> f, const WeightedMesh& mesh);

/// Ent_mu(f^2) / (2 int f'^2 dmu).
double lsi_rayleigh(std::span<const double> f, const WeightedMesh& mesh, const SymTridiagonal& stiffness);

struct LsiOptions {
  int restarts = 3;
  int max_iter = 400;
  double tol = 1e-9;
  std::vector<double> amplitude_grid = default_amplitudes();
  std::uint64_t seed = 0x5eed;
  bool rothaus_upper = true;

  static std::vector<double> default_amplitudes();  // 13 log-spaced points on [1e-3, 1]
};

struct LsiResult {
  double c_ls;
  double lower_bound;
  double upper_bound;  // +inf when no defective inequality is available
  double c_p;
  std::vector<double> nodes;
  std::vector<double> extremal_values;
  int restarts_used;
  bool converged;
  std::string diagnostics;
};

LsiResult lsi_constant(const PiecewisePotential& pot, double t, const GridSpec& grid = {},
                       const LsiOptions& opts = {});

/// Maximizes the quotient on an already assembled problem with known gap eigenpair.
LsiResult maximize_lsi_quotient(const Assembly& problem, const SpectralResult& gap, const LsiOptions& opts);

double rothaus_tighten(double a, double b, double c_p);

struct DefectiveLsi {
  double a;
  double b;
};

/// Constants of Ent(f^2) <= 2A int f'^2 + B int f^2 built from a plateau/wing
/// decomposition: segment constant on [a, b], Bakry-Émery t / kappa on each
/// half-line, and the log(1/mass) cost of splitting the measure.
DefectiveLsi defective_lsi_components(const PiecewisePotential& pot, double t, const GridSpec& grid = {});

}  // namespace spectra
