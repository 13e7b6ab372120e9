#pragma once

// Convex plateau potentials on the line: V = 0 on [a, b] and an analytic wing
// on each side, written in the distance r to the plateau.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spectra/kernels.hpp"

namespace spectra {

using kernels::PowerTerm;

enum class WingKind { power, quadratic, series };

/// Wing profile V(r) = sum_k c_k r^{p_k}, r >= 0. The term with the smallest
/// exponent is the leading one: its exponent is the growth exponent alpha and
/// a = 1 / coefficient is the boundary coefficient.
class WingSpec {
 public:
  static WingSpec power(double coefficient, double exponent,
                        std::optional<double> upper_exponent = std::nullopt);
  /// kappa / 2 * r^2, so that the one-sided second derivative at the plateau is kappa.
  static WingSpec quadratic(double curvature);
  static WingSpec series(std::vector<PowerTerm> terms,
                         std::optional<double> upper_exponent = std::nullopt);

  WingKind kind() const { return kind_; }
  const std::vector<PowerTerm>& terms() const { return terms_; }

  double exponent() const { return terms_.front().exponent; }
  double coefficient() const { return terms_.front().coefficient; }
  double upper_exponent() const { return upper_exponent_; }
  /// a_side in V ~ r^alpha / a_side.
  double boundary_coefficient() const { return 1.0 / coefficient(); }
  double largest_exponent() const { return terms_.back().exponent; }

  double value(double r) const;
  double slope(double r) const;
  /// Second derivative; at r = 0 the one-sided limit (may be +inf for alpha < 2).
  double curvature(double r) const;
  /// kappa = V''(0+), finite and positive only for alpha = 2.
  std::optional<double> junction_curvature() const;

  /// Smallest r with value(r) >= level.
  double inverse(double level) const;

  WingSpec scaled(double s) const;  // profile of r -> V(r / s)

  bool operator==(const WingSpec&) const = default;

 private:
  WingSpec(WingKind kind, std::vector<PowerTerm> terms, double upper);

  WingKind kind_;
  std::vector<PowerTerm> terms_;
  double upper_exponent_;
};

class PiecewisePotential {
 public:
  PiecewisePotential(double plateau_left, double plateau_right, WingSpec left_wing,
                     WingSpec right_wing);

  double plateau_left() const { return a_; }
  double plateau_right() const { return b_; }
  double width() const { return b_ - a_; }
  bool degenerate() const { return a_ == b_; }
  const WingSpec& left_wing() const { return left_; }
  const WingSpec& right_wing() const { return right_; }

  bool symmetric() const { return left_ == right_; }
  bool common_exponent() const { return left_.exponent() == right_.exponent(); }

  double distance(double x) const;
  double eval(double x) const;
  double eval_grad(double x) const;
  /// One-sided at the junctions: V''(a-) at a, V''(b+) at b, 0 inside (a, b).
  double eval_hess(double x) const;

  /// kappa_a = V''(a-), kappa_b = V''(b+).
  std::optional<double> kappa_left() const { return left_.junction_curvature(); }
  std::optional<double> kappa_right() const { return right_.junction_curvature(); }

  /// Flat view for the SIMD kernels; valid while this object lives.
  kernels::PlateauProfile profile() const;

  /// The potential x -> V(x / s).
  PiecewisePotential scaled(double s) const;

 private:
  double a_;
  double b_;
  WingSpec left_;
  WingSpec right_;
};

/// Closed-form Gibbs potentials used throughout the tests and the CLI.
namespace potentials {
/// 1/2 dist(x, [-pi/2, pi/2])^2
PiecewisePotential counterexample();
/// x^2 / 2 (a = b = 0)
PiecewisePotential gaussian();
/// Plateau [-pi/2, pi/2] with kappa_a / 2 r^2 on the left and kappa_b / 2 r^2 on the right.
PiecewisePotential asymmetric(double kappa_left, double kappa_right);
/// dist(x, [-pi/2, pi/2])^4
PiecewisePotential quartic();
}  // namespace potentials

/// Radii [r_min, r_max] of the PL search window, measured from the plateau.
struct PlWindow {
  double r_min;
  double r_max;
};

/// sup of V / V'^2 over the window (both sides), golden-section refined.
/// Throws PlDivergence when r_max is infinite and the ratio grows without bound.
double pl_constant(const PiecewisePotential& pot, PlWindow window, int n_samples = 2000);
/// Window [1e-3 R, R].
double pl_constant(const PiecewisePotential& pot, double search_radius, int n_samples = 2000);

struct GrowthCheck {
  bool holds;
  double worst_x;       // most violating (or tightest) sample
  double worst_margin;  // V(x) - dist^2/(4 c_pl), relative to V(x)
};

GrowthCheck quadratic_growth_check(const PiecewisePotential& pot, double c_pl,
                                   const std::vector<double>& xs);

bool gradient_flow_decay_check(const PiecewisePotential& pot, double c_pl, double y0,
                               double horizon, double dt);

struct AssumptionCheck {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<AssumptionCheck> validate_assumptions(const PiecewisePotential& pot);
bool all_passed(const std::vector<AssumptionCheck>& report);

}  // namespace spectra
