#include "spectra/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "spectra/errors.hpp"
#include "spectra/quadrature.hpp"
#include "spectra/spectral.hpp"

namespace spectra {

namespace {

constexpr double kPi = std::numbers::pi;

double segment_constant(const PiecewisePotential& pot) {
  return pot.width() * pot.width() / (kPi * kPi);
}

void require_plateau(const PiecewisePotential& pot) {
  if (pot.degenerate()) {
    throw InvalidInput("single minimizer: use theorem_cs_limits instead of plateau expansions");
  }
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::poincare: return "poincare";
    case ModelKind::lsi: return "lsi";
    case ModelKind::partition: return "partition";
    case ModelKind::conjecture: return "conjecture";
    case ModelKind::counterexample_lower: return "counterexample-lower";
  }
  return "unknown";
}

double AsymptoticModel::evaluate(double t) const {
  if (t == 0.0) return c0;
  return c0 + coefficient * std::pow(t, exponent);
}

CsLimits theorem_cs_limits(const PiecewisePotential& pot, double pl_radius) {
  if (!pot.degenerate()) {
    throw InvalidInput("single-minimizer limits need a unique minimizer; use plateau expansions");
  }
  const auto ka = pot.kappa_left();
  const auto kb = pot.kappa_right();
  if (!ka || !kb || *ka != *kb) {
    throw InvalidInput("single-minimizer limits need a finite, two-sided Hessian at the minimizer");
  }
  const double c_pl = pl_constant(pot, pl_radius);
  return {2.0 * c_pl, 1.0 / *ka};
}

double conjecture_prediction(const PiecewisePotential& pot, double t, double c_pl) {
  return conjecture_model(pot, c_pl).evaluate(t);
}

double conjecture_prediction(const PiecewisePotential& pot, double t) {
  return conjecture_prediction(pot, t, pl_constant(pot, 10.0));
}

AsymptoticModel conjecture_model(const PiecewisePotential& pot, double c_pl) {
  if (!(c_pl > 0.0) || !std::isfinite(c_pl)) throw InvalidInput("PL constant must be finite and > 0");
  return {ModelKind::conjecture, segment_constant(pot), 2.0 * c_pl, 1.0};
}

double counterexample_lower_bound(double t) {
  if (!(t >= 0.0)) throw InvalidInput("temperature t must be >= 0");
  return 1.0 + std::sqrt(8.0 * t / kPi);
}

double theorem_1d_coefficient(double kappa_a, double kappa_b) {
  if (!(kappa_a > 0.0) || !(kappa_b > 0.0)) throw InvalidInput("wing curvatures must be > 0");
  return (1.0 / std::sqrt(kappa_a) + 1.0 / std::sqrt(kappa_b)) * std::sqrt(2.0 / kPi);
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("growth exponent must be > 0");
  return std::tgamma(1.0 / alpha) / alpha;
}

AsymptoticModel poincare_expansion_1d(const PiecewisePotential& pot) {
  require_plateau(pot);
  if (!pot.common_exponent()) {
    throw InvalidInput("1D expansion needs the same growth exponent on both wings");
  }
  const double alpha = pot.left_wing().exponent();
  const double a = pot.plateau_left();
  const double b = pot.plateau_right();
  const double len = b - a;

  // Neumann gap eigenfunction of the segment, scaled so that int f'^2 = 1.
  const auto base = neumann_baseline(a, b);
  const double scale = std::sqrt(2.0 * len) / kPi;
  const auto f = [&](double x) { return scale * base.eigenfunction(x); };
  const auto df = [&](double x) { return scale * (kPi / len) * std::cos(kPi * (x - 0.5 * (a + b)) / len); };
  // In one dimension the boundary-gradient term vanishes (Neumann condition).
  const double slope_scale = scale * kPi / len;
  if (std::abs(df(a)) > 1e-12 * slope_scale || std::abs(df(b)) > 1e-12 * slope_scale) {
    throw NumericalError("Neumann eigenfunction has nonzero boundary derivative");
  }
  const auto sigma = limiting_sigma(pot);
  const double trace = sigma.weight_left * f(a) * f(a) + sigma.weight_right * f(b) * f(b);
  const double mass = std::pow(pot.left_wing().boundary_coefficient(), 1.0 / alpha) +
                      std::pow(pot.right_wing().boundary_coefficient(), 1.0 / alpha);
  return {ModelKind::poincare, segment_constant(pot), c_alpha(alpha) * mass * trace, 1.0 / alpha};
}

AsymptoticModel lsi_expansion_1d(const PiecewisePotential& pot) {
  require_plateau(pot);
  const auto ka = pot.kappa_left();
  const auto kb = pot.kappa_right();
  if (!ka || !kb) throw InvalidInput("LSI expansion needs quadratic wings");
  const double coefficient =
      std::sqrt(2.0) * pot.width() * std::pow(kPi, -1.5) * (1.0 / std::sqrt(*ka) + 1.0 / std::sqrt(*kb));
  return {ModelKind::lsi, segment_constant(pot), coefficient, 0.5};
}

AsymptoticModel z_expansion_model(const PiecewisePotential& pot) {
  const auto z = z_expansion(pot);
  return {ModelKind::partition, pot.width(), z.gamma, z.exponent};
}

}  // namespace spectra
