#pragma once

// Closed-form small-temperature expansions c0 + coefficient * t^exponent.

#include <string_view>

#include "spectra/potential.hpp"

namespace spectra {

enum class ModelKind { poincare, lsi, partition, conjecture, counterexample_lower };

std::string_view model_name(ModelKind kind);

struct AsymptoticModel {
  ModelKind kind;
  double c0;
  double coefficient;
  double exponent;

  double evaluate(double t) const;
};

struct CsLimits {
  double lsi_slope;       // lim C_LS(mu_t) / t = 2 C_PL
  double poincare_slope;  // lim C_P(mu_t) / t = 1 / V''(x0)
};

/// Single-minimizer limits; needs a degenerate plateau with quadratic-led wings
/// (PL constant is taken on a window of radius pl_radius).
CsLimits theorem_cs_limits(const PiecewisePotential& pot, double pl_radius = 10.0);

/// (b - a)^2 / pi^2 + 2 C_PL t.
double conjecture_prediction(const PiecewisePotential& pot, double t, double c_pl);
double conjecture_prediction(const PiecewisePotential& pot, double t);
AsymptoticModel conjecture_model(const PiecewisePotential& pot, double c_pl);

/// 1 + sqrt(8 t / pi).
double counterexample_lower_bound(double t);

/// (kappa_a^{-1/2} + kappa_b^{-1/2}) sqrt(2 / pi).
double theorem_1d_coefficient(double kappa_a, double kappa_b);

/// C_alpha = Gamma(1/alpha) / alpha.
double c_alpha(double alpha);

AsymptoticModel poincare_expansion_1d(const PiecewisePotential& pot);
AsymptoticModel lsi_expansion_1d(const PiecewisePotential& pot);
AsymptoticModel z_expansion_model(const PiecewisePotential& pot);

}  // namespace spectra
