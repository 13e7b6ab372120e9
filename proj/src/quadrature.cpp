#include "spectra/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "spectra/errors.hpp"
#include "spectra/kernels.hpp"

namespace spectra {

namespace {

constexpr std::array<double, 8> kGlNodes = {
    -0.96028985649753623168, -0.79666647741362673959, -0.52553240991632898582,
    -0.18343464249564980494, 0.18343464249564980494,  0.52553240991632898582,
    0.79666647741362673959,  0.96028985649753623168};
constexpr std::array<double, 8> kGlWeights = {
    0.10122853629037625915, 0.22238103445337447054, 0.31370664587788728734,
    0.36268378337836198297, 0.36268378337836198297, 0.31370664587788728734,
    0.22238103445337447054, 0.10122853629037625915};

void require_positive_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("temperature t must be finite and > 0");
}

// Distances 0 = r_0 < r_1 < ... < r_m = r_max for one wing.
std::vector<double> wing_radii(const WingSpec& wing, double t, const GridSpec& grid) {
  const double r_max = truncation_radius(wing, t, grid.truncation_threshold);
  const double s = layer_scale(wing, t);
  const double h0 = s / grid.layer_cells_per_scale;
  const double cap = 0.5 * s;
  std::vector<double> r{0.0};
  double h = h0;
  double pos = 0.0;
  while (pos < r_max) {
    if (pos >= s) h = std::min(h * grid.refinement_ratio, cap);
    pos += h;
    if (pos > r_max - 0.25 * h) pos = r_max;
    r.push_back(pos);
  }
  return r;
}

// Symmetric Gauss-Legendre integral of f on [0, r_max] split into uniform cells.
template <class F>
double gl_integral(F&& f, std::span<const double> nodes) {
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
    const double mid = 0.5 * (nodes[c] + nodes[c + 1]);
    const double half = 0.5 * (nodes[c + 1] - nodes[c]);
    double cell = 0.0;
    for (int q = 0; q < GibbsRule::kOrder; ++q) cell += kGlWeights[q] * f(mid + half * kGlNodes[q]);
    sum += half * cell;
  }
  return sum;
}

}  // namespace

void GridSpec::validate() const {
  if (!(truncation_threshold >= 30.0)) throw InvalidInput("truncation threshold must be >= 30");
  if (n_plateau < 64) throw InvalidInput("n_plateau must be >= 64");
  if (layer_cells_per_scale < 8) throw InvalidInput("layer_cells_per_scale must be >= 8");
  if (!(refinement_ratio > 1.0)) throw InvalidInput("refinement_ratio must be > 1");
}

double truncation_radius(const WingSpec& wing, double t, double tau) { return wing.inverse(tau * t); }

double layer_scale(const WingSpec& wing, double t) {
  return std::pow(t / wing.coefficient(), 1.0 / wing.exponent());
}

std::vector<double> build_nodes(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  grid.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("temperature t must be finite and >= 0");
  const double a = pot.plateau_left();
  const double b = pot.plateau_right();
  std::vector<double> nodes;
  if (t > 0.0) {
    const auto left = wing_radii(pot.left_wing(), t, grid);
    for (auto it = left.rbegin(); it + 1 != left.rend(); ++it) nodes.push_back(a - *it);
  } else if (pot.degenerate()) {
    throw InvalidInput("t = 0 needs a plateau with a < b");
  }
  if (!pot.degenerate()) {
    const int n = grid.n_plateau;
    for (int i = 0; i < n; ++i) nodes.push_back(a + (b - a) * i / n);
  }
  nodes.push_back(b);
  if (t > 0.0) {
    const auto right = wing_radii(pot.right_wing(), t, grid);
    for (std::size_t i = 1; i < right.size(); ++i) nodes.push_back(b + right[i]);
  }
  return nodes;
}

std::vector<double> bisect_nodes(std::span<const double> nodes) {
  std::vector<double> out;
  if (nodes.empty()) return out;
  out.reserve(2 * nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    out.push_back(nodes[i]);
    out.push_back(0.5 * (nodes[i] + nodes[i + 1]));
  }
  out.push_back(nodes.back());
  return out;
}

GibbsRule::GibbsRule(const PiecewisePotential& pot, double t, std::span<const double> nodes) {
  if (nodes.size() < 2) throw InvalidInput("mesh needs at least two nodes");
  if (!(t >= 0.0)) throw InvalidInput("temperature t must be >= 0");
  const std::size_t n_cells = nodes.size() - 1;
  x_.resize(n_cells * kOrder);
  std::vector<double> gl(n_cells * kOrder);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double mid = 0.5 * (nodes[c] + nodes[c + 1]);
    const double half = 0.5 * (nodes[c + 1] - nodes[c]);
    if (!(half > 0.0)) throw InvalidInput("mesh nodes must be strictly increasing");
    for (int q = 0; q < kOrder; ++q) {
      x_[c * kOrder + q] = mid + half * kGlNodes[q];
      gl[c * kOrder + q] = half * kGlWeights[q];
    }
  }
  w_.resize(x_.size());
  if (t > 0.0) {
    const auto profile = pot.profile();
    kernels::gibbs_weight(profile, 1.0 / t, x_, w_);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] *= gl[i];
  } else {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = pot.eval(x_[i]) == 0.0 ? gl[i] : 0.0;
  }
}

double GibbsRule::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) sum += w_[i] * f(x_[i]);
  return sum;
}

double GibbsRule::total() const {
  double sum = 0.0;
  for (double w : w_) sum += w;
  return sum;
}

std::span<const double> GibbsRule::reference_nodes() { return kGlNodes; }
std::span<const double> GibbsRule::reference_weights() { return kGlWeights; }

double partition_function(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  require_positive_t(t);
  return GibbsRule(pot, t, build_nodes(pot, t, grid)).total();
}

Estimate partition_function_estimate(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  require_positive_t(t);
  const auto nodes = build_nodes(pot, t, grid);
  const double coarse = GibbsRule(pot, t, nodes).total();
  const double fine = GibbsRule(pot, t, bisect_nodes(nodes)).total();
  return {coarse, std::abs(fine - coarse) / fine};
}

ZExpansion z_expansion(const PiecewisePotential& pot) {
  if (!pot.common_exponent()) {
    throw InvalidInput("Z_t expansion needs the same growth exponent on both wings");
  }
  const double alpha = pot.left_wing().exponent();
  const double c_alpha = std::tgamma(1.0 / alpha) / alpha;
  const double sum = std::pow(pot.left_wing().boundary_coefficient(), 1.0 / alpha) +
                     std::pow(pot.right_wing().boundary_coefficient(), 1.0 / alpha);
  return {c_alpha * sum, 1.0 / alpha};
}

double weighted_moment(const PiecewisePotential& pot, double t,
                       const std::function<double(double)>& f, const GridSpec& grid) {
  const GibbsRule rule(pot, t, build_nodes(pot, t, grid));
  return rule.integrate(f) / rule.total();
}

double mean(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  return weighted_moment(pot, t, [](double x) { return x; }, grid);
}

double variance(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  const GibbsRule rule(pot, t, build_nodes(pot, t, grid));
  const double z = rule.total();
  const double m = rule.integrate([](double x) { return x; }) / z;
  return rule.integrate([m](double x) { return (x - m) * (x - m); }) / z;
}

BoundaryMeasure boundary_measure_sigma_t(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  require_positive_t(t);
  const GibbsRule rule(pot, t, build_nodes(pot, t, grid));
  const double a = pot.plateau_left();
  const double b = pot.plateau_right();
  double left = 0.0;
  double right = 0.0;
  const auto x = rule.points();
  const auto w = rule.weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < a) left += w[i];
    if (x[i] > b) right += w[i];
  }
  const double weight_right = right / (left + right);
  return {1.0 - weight_right, weight_right};
}

BoundaryMeasure limiting_sigma(const PiecewisePotential& pot) {
  if (!pot.common_exponent()) {
    throw InvalidInput("limiting boundary measure needs the same growth exponent on both wings");
  }
  const double alpha = pot.left_wing().exponent();
  const double l = std::pow(pot.left_wing().boundary_coefficient(), 1.0 / alpha);
  const double r = std::pow(pot.right_wing().boundary_coefficient(), 1.0 / alpha);
  const double weight_right = r / (l + r);
  return {1.0 - weight_right, weight_right};
}

MeanControlTerms boundary_mean_control_terms(const std::function<double(double)>& g,
                                             const std::function<double(double)>& g_prime, double t,
                                             double eps, MeanControlConstants constants) {
  require_positive_t(t);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  const double root_t = std::sqrt(t);
  std::vector<double> nodes(49);
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = 12.0 * root_t * i / 48.0;
  const auto gauss = [t](double x) { return std::exp(-x * x / (2.0 * t)); };
  const double g0 = g(0.0);
  const double mass_g = gl_integral([&](double x) { return g(x) * g(x) * gauss(x); }, nodes);
  const double energy = gl_integral([&](double x) { return g_prime(x) * g_prime(x) * gauss(x); }, nodes);
  const double half_pi = std::numbers::pi / 2.0;
  double eps_prime = eps * std::sqrt(half_pi);
  double c_eps = 1.0 + 1.0 / eps;
  if (constants == MeanControlConstants::display) {
    eps_prime = std::sqrt(half_pi) * (std::sqrt(1.0 + eps) - 1.0);
    c_eps = 0.5 * (1.0 + 1.0 / eps);
  }
  const double lhs = std::abs(mass_g - std::sqrt(half_pi * t) * g0 * g0);
  const double rhs = eps_prime * root_t * g0 * g0 + c_eps * t * energy;
  return {lhs, rhs};
}

bool boundary_mean_control_check(const std::function<double(double)>& g,
                                 const std::function<double(double)>& g_prime, double t, double eps,
                                 MeanControlConstants constants) {
  const auto [lhs, rhs] = boundary_mean_control_terms(g, g_prime, t, eps, constants);
  const double g0 = g(0.0);
  return lhs <= rhs + 1e-12 * (rhs + std::sqrt(t) * g0 * g0);
}

bool generalized_mean_control_check(const WingSpec& wing, double t, double c_p,
                                    const std::function<double(double)>& g,
                                    const std::function<double(double)>& g_prime, double eps) {
  require_positive_t(t);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  const auto radii = wing_radii(wing, t, GridSpec{});
  const auto weight = [&](double r) { return std::exp(-wing.value(r) / t); };
  const double g0 = g(0.0);
  const double mass = gl_integral(weight, radii);
  const double excess = gl_integral([&](double r) { return (g(r) * g(r) - g0 * g0) * weight(r); }, radii);
  const double energy = gl_integral([&](double r) { return g_prime(r) * g_prime(r) * weight(r); }, radii);
  const double rhs = eps * mass * g0 * g0 + (1.0 + 1.0 / eps) * c_p * energy;
  return std::abs(excess) <= rhs * (1.0 + 1e-10) + 1e-14 * mass * g0 * g0;
}

}  // namespace spectra
