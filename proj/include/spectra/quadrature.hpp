#pragma once

// Integration against the unnormalized Gibbs weight exp(-V/t) on a truncated
// mesh that resolves the boundary layers next to the plateau.

#include <functional>
#include <span>
#include <vector>

#include "spectra/potential.hpp"

namespace spectra {

struct GridSpec {
  double truncation_threshold = 40.0;  // drop x with V(x)/t beyond this
  int n_plateau = 2000;                // uniform cells on [a, b]
  int layer_cells_per_scale = 16;      // cells per boundary-layer width
  double refinement_ratio = 1.5;       // geometric coarsening away from the plateau

  void validate() const;
};

/// Mesh nodes (strictly increasing). With t = 0 only the plateau is meshed.
std::vector<double> build_nodes(const PiecewisePotential& pot, double t, const GridSpec& grid);
/// Every cell split at its midpoint.
std::vector<double> bisect_nodes(std::span<const double> nodes);

/// Radius from the plateau beyond which the wing weight is below exp(-tau).
double truncation_radius(const WingSpec& wing, double t, double tau);
/// Width (t / coefficient)^(1/alpha) of the boundary layer.
double layer_scale(const WingSpec& wing, double t);

/// Gauss-Legendre points and weights (8 per cell) with the Gibbs factor folded in.
class GibbsRule {
 public:
  static constexpr int kOrder = 8;

  GibbsRule(const PiecewisePotential& pot, double t, std::span<const double> nodes);

  std::span<const double> points() const { return x_; }
  /// GL weight times exp(-V/t) at each point.
  std::span<const double> weights() const { return w_; }
  std::size_t cells() const { return x_.size() / kOrder; }

  /// Unnormalized integral of f exp(-V/t).
  double integrate(const std::function<double(double)>& f) const;
  double total() const;

  /// Reference GL nodes on [-1, 1] and their weights.
  static std::span<const double> reference_nodes();
  static std::span<const double> reference_weights();

 private:
  std::vector<double> x_;
  std::vector<double> w_;
};

struct Estimate {
  double value;
  double relative_error;  // from one mesh bisection
};

double partition_function(const PiecewisePotential& pot, double t, const GridSpec& grid = {});
Estimate partition_function_estimate(const PiecewisePotential& pot, double t, const GridSpec& grid = {});

/// Z_t = (b - a) + gamma t^exponent + o(t^exponent) for a common wing exponent.
struct ZExpansion {
  double gamma;
  double exponent;
};
ZExpansion z_expansion(const PiecewisePotential& pot);

double weighted_moment(const PiecewisePotential& pot, double t,
                       const std::function<double(double)>& f, const GridSpec& grid = {});
double mean(const PiecewisePotential& pot, double t, const GridSpec& grid = {});
double variance(const PiecewisePotential& pot, double t, const GridSpec& grid = {});

struct BoundaryMeasure {
  double weight_left;
  double weight_right;
};

/// Share of the off-plateau mass on each side.
BoundaryMeasure boundary_measure_sigma_t(const PiecewisePotential& pot, double t, const GridSpec& grid = {});
/// t -> 0 limit: weights proportional to a_side^(1/alpha).
BoundaryMeasure limiting_sigma(const PiecewisePotential& pot);

/// Constants of the half-line mean-control inequality
///   |int_0^inf g^2 e^{-x^2/2t} - sqrt(pi t/2) g(0)^2|
///       <= eps' sqrt(t) g(0)^2 + C_eps t int_0^inf g'^2 e^{-x^2/2t}.
enum class MeanControlConstants {
  proof,    // eps' = eps sqrt(pi/2), C_eps = 1 + 1/eps
  display,  // eps' = sqrt(pi/2)(sqrt(1+eps) - 1), C_eps = (1 + 1/eps)/2
};

struct MeanControlTerms {
  double lhs;
  double rhs;
};

MeanControlTerms boundary_mean_control_terms(const std::function<double(double)>& g,
                                             const std::function<double(double)>& g_prime, double t,
                                             double eps,
                                             MeanControlConstants constants = MeanControlConstants::proof);
bool boundary_mean_control_check(const std::function<double(double)>& g,
                                 const std::function<double(double)>& g_prime, double t, double eps,
                                 MeanControlConstants constants = MeanControlConstants::proof);

/// Same inequality for the half-line weight exp(-W(r)/t) of a wing:
///   |int (g^2 - g(0)^2) e^{-W/t}| <= eps mass g(0)^2 + (1 + 1/eps) c_p int g'^2 e^{-W/t},
/// where c_p is the Poincaré constant of the symmetrized wing measure.
bool generalized_mean_control_check(const WingSpec& wing, double t, double c_p,
                                    const std::function<double(double)>& g,
                                    const std::function<double(double)>& g_prime, double eps);

}  // namespace spectra
