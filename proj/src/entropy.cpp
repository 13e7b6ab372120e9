#include "spectra/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "spectra/errors.hpp"
#include "spectra/kernels.hpp"

namespace spectra {

namespace {

constexpr double kFloor = 1e-30;
constexpr int kWindow = 50;
// Below this relative amplitude the entropy of f^2 is dominated by rounding
// (it scales like the squared amplitude); the s -> 0 limit is covered by c_p.
constexpr double kMinAmplitude = 1e-3;

// Entropy and Dirichlet energy of the piecewise-linear interpolant of nodal
// values, integrated with the assembly's Gauss-Legendre rule. Using the actual
// P1 function (rather than a lumped nodal sum) keeps every quotient a genuine
// lower bound on the continuous constant.
class QuotientEvaluator {
 public:
  explicit QuotientEvaluator(const Assembly& problem)
      : p_(problem),
        z_(std::accumulate(problem.quad_weights.begin(), problem.quad_weights.end(), 0.0)),
        fq_(problem.quad_weights.size()),
        gq_(problem.quad_weights.size()),
        kf_(problem.mesh.nodes.size()) {
    const auto ref = GibbsRule::reference_nodes();
    for (int q = 0; q < GibbsRule::kOrder; ++q) rho_[q] = 0.5 * (1.0 + ref[q]);
  }

  double total() const { return z_; }

  void interpolate(std::span<const double> f) {
    const std::size_t cells = f.size() - 1;
    for (std::size_t c = 0; c < cells; ++c) {
      const double f0 = f[c];
      const double df = f[c + 1] - f[c];
      for (int q = 0; q < GibbsRule::kOrder; ++q) fq_[c * GibbsRule::kOrder + q] = f0 + rho_[q] * df;
    }
  }

  // int f^2 dmu and int f dmu of the interpolant.
  kernels::Moments moments(std::span<const double> f) {
    interpolate(f);
    return kernels::weighted_moments(p_.quad_weights, fq_);
  }

  double entropy(std::span<const double> f) {
    const auto mom = moments(f);
    const double m = mom.second / z_;
    if (!(m > 0.0)) return 0.0;
    return std::max(0.0, kernels::entropy_sum(p_.quad_weights, fq_, std::log(m), kFloor) / z_);
  }

  // 2 int f'^2 dmu, summed cell by cell from nodal differences so that nearly
  // constant f do not lose their energy to cancellation.
  double dirichlet(std::span<const double> f) {
    const auto& nodes = p_.mesh.nodes;
    const auto& cw = p_.mesh.cell_weights;
    double sum = 0.0;
    for (std::size_t c = 0; c + 1 < f.size(); ++c) {
      const double slope = (f[c + 1] - f[c]) / (nodes[c + 1] - nodes[c]);
      sum += cw[c] * slope * slope;
    }
    return 2.0 * sum / z_;
  }

  // K f from nodal differences.
  void stiffness_times(std::span<const double> f, std::span<double> out) const {
    const auto& nodes = p_.mesh.nodes;
    const auto& cw = p_.mesh.cell_weights;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c = 0; c + 1 < f.size(); ++c) {
      const double h = nodes[c + 1] - nodes[c];
      const double flux = cw[c] * (f[c + 1] - f[c]) / (h * h);
      out[c] -= flux;
      out[c + 1] += flux;
    }
  }

  double quotient(std::span<const double> f) {
    const double d = dirichlet(f);
    if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return entropy(f) / d;
  }

  // Gradient of the quotient with respect to the nodal values.
  double gradient(std::span<const double> f, std::span<double> out) {
    const auto mom = moments(f);
    const double m = mom.second / z_;
    const double ent = kernels::entropy_sum(p_.quad_weights, fq_, std::log(m), kFloor) / z_;
    kernels::entropy_gradient(p_.quad_weights, fq_, std::log(m), kFloor, gq_);
    stiffness_times(f, kf_);
    const double d = dirichlet(f);
    const double q = ent / d;
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t cells = f.size() - 1;
    for (std::size_t c = 0; c < cells; ++c) {
      double left = 0.0;
      double right = 0.0;
      for (int k = 0; k < GibbsRule::kOrder; ++k) {
        const double g = gq_[c * GibbsRule::kOrder + k];
        right += g * rho_[k];
        left += g * (1.0 - rho_[k]);
      }
      out[c] += left;
      out[c + 1] += right;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] / z_ - q * 4.0 * kf_[i] / z_) / d;
    return q;
  }

 private:
  const Assembly& p_;
  double z_;
  double rho_[GibbsRule::kOrder];
  std::vector<double> fq_;
  std::vector<double> gq_;
  std::vector<double> kf_;
};

void normalize(std::span<double> f, QuotientEvaluator& eval) {
  const double m = eval.moments(f).second / eval.total();
  const double s = 1.0 / std::sqrt(m);
  for (double& v : f) v *= s;
}

// Relative amplitude sqrt(Var f) / |mean f|.
double amplitude(std::span<const double> f, QuotientEvaluator& eval) {
  const auto mom = eval.moments(f);
  const double mean = mom.first / eval.total();
  const double var = std::max(0.0, mom.second / eval.total() - mean * mean);
  return std::sqrt(var) / std::abs(mean);
}

void solve_spd(std::span<const double> diag, std::span<const double> off, std::span<const double> rhs,
               std::span<double> x) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double d = diag[0];
  x[0] = rhs[0] / d;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = off[i - 1] / d;
    d = diag[i] - off[i - 1] * c[i - 1];
    x[i] = (rhs[i] - off[i - 1] * x[i - 1]) / d;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
}

struct AscentOutcome {
  double value;
  bool converged;
  std::string note;
};

// Preconditioned (H^1 Riesz map) gradient ascent with Armijo backtracking,
// keeping int f^2 dmu = 1.
AscentOutcome ascend(std::vector<double>& f, QuotientEvaluator& eval, const Assembly& problem,
                     double lambda1, const LsiOptions& opts) {
  const std::size_t n = f.size();
  std::vector<double> pre_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    pre_diag[i] = problem.stiffness.diag[i] + lambda1 * problem.mesh.node_weights[i];
  }
  std::vector<double> grad(n);
  std::vector<double> dir(n);
  std::vector<double> trial(n);
  normalize(f, eval);
  double q = eval.quotient(f);
  std::vector<double> history{q};
  double step = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    eval.gradient(f, grad);
    solve_spd(pre_diag, problem.stiffness.off, grad, dir);
    const double slope = std::inner_product(grad.begin(), grad.end(), dir.begin(), 0.0);
    if (!(slope > 0.0)) return {q, true, "stationary point"};
    if (step == 0.0) {
      double fmax = 0.0;
      double dmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        fmax = std::max(fmax, std::abs(f[i]));
        dmax = std::max(dmax, std::abs(dir[i]));
      }
      step = 0.05 * fmax / dmax;
    }
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = f[i] + step * dir[i];
      const double qt = eval.quotient(trial);
      if (std::isfinite(qt) && qt >= q + 1e-4 * step * slope) {
        accepted = true;
        q = qt;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {q, true, "line search stalled"};
    normalize(trial, eval);
    if (amplitude(trial, eval) < kMinAmplitude) {
      return {q, true, "maximizing sequence drifts toward vanishing amplitude"};
    }
    f.swap(trial);
    step *= 2.0;
    history.push_back(q);
    if (history.size() > kWindow) {
      const double old = history[history.size() - 1 - kWindow];
      if ((q - old) <= opts.tol * std::abs(q)) return {q, true, ""};
    }
  }
  return {q, false, "iteration limit reached"};
}

}  // namespace

std::vector<double> LsiOptions::default_amplitudes() {
  std::vector<double> s(13);
  for (int i = 0; i < 13; ++i) s[i] = std::pow(10.0, -3.0 + 3.0 * i / 12.0);
  return s;
}

double entropy_functional(std::span<const double> f, const WeightedMesh& mesh) {
  if (f.size() != mesh.node_weights.size()) throw InvalidInput("function and mesh sizes differ");
  const double z = mesh.total_weight();
  const auto mom = kernels::weighted_moments(mesh.node_weights, f);
  if (!(mom.second > 0.0)) throw InvalidInput("entropy of the zero function");
  const double m = mom.second / z;
  return std::max(0.0, kernels::entropy_sum(mesh.node_weights, f, std::log(m), kFloor) / z);
}

double lsi_rayleigh(std::span<const double> f, const WeightedMesh& mesh, const SymTridiagonal& stiffness) {
  // Constants are in the kernel of the stiffness matrix; shifting first keeps
  // the quadratic form accurate for nearly constant f.
  std::vector<double> shifted(f.begin(), f.end());
  const double c = f.empty() ? 0.0 : f[0];
  for (double& v : shifted) v -= c;
  const double energy = stiffness.quadratic_form(shifted) / mesh.total_weight();
  if (!(energy > 0.0)) throw InvalidInput("LSI quotient undefined for constant functions");
  return entropy_functional(f, mesh) / (2.0 * energy);
}

LsiResult maximize_lsi_quotient(const Assembly& problem, const SpectralResult& gap, const LsiOptions& opts) {
  QuotientEvaluator eval(problem);
  const auto& g1 = gap.eigenfunction;
  const std::size_t n = g1.size();
  const double g_max = std::abs(*std::max_element(g1.begin(), g1.end(),
                                                  [](double a, double b) { return std::abs(a) < std::abs(b); }));

  // s -> 0 limit of f = 1 + s g1: the variance quotient of g1 under the
  // quadrature rule, which is the Galerkin c_p.
  double best = gap.c_p;
  std::vector<double> best_f(n, 1.0);
  double best_s = 0.0;

  std::vector<double> f(n);
  for (double s : opts.amplitude_grid) {
    for (std::size_t i = 0; i < n; ++i) f[i] = 1.0 + s * g1[i] / g_max;
    const double q = eval.quotient(f);
    if (std::isfinite(q) && q > best) {
      best = q;
      best_f = f;
      best_s = s;
    }
  }

  std::vector<std::vector<double>> starts;
  {
    const double s = best_s > 0.0 ? best_s : opts.amplitude_grid.empty() ? 1e-2 : opts.amplitude_grid.back();
    for (std::size_t i = 0; i < n; ++i) f[i] = 1.0 + s * g1[i] / g_max;
    starts.push_back(f);
  }
  const auto& nodes = problem.mesh.nodes;
  const double x0 = nodes.front();
  const double span = nodes.back() - nodes.front();
  for (int r = 0; r < opts.restarts; ++r) {
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(-3.0, 0.0);
    const double s = std::pow(10.0, unit(rng));
    double coef[5];
    for (double& c : coef) c = 0.3 * normal(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (nodes[i] - x0) / span;
      double pert = g1[i] / g_max;
      for (int k = 0; k < 5; ++k) pert += coef[k] * std::cos((k + 1) * std::numbers::pi * u) / (k + 1);
      f[i] = 1.0 + s * pert;
    }
    starts.push_back(f);
  }

  bool converged = true;
  int used = 0;
  std::string notes;
  for (auto& start : starts) {
    const auto outcome = ascend(start, eval, problem, gap.lambda1, opts);
    ++used;
    converged = converged && outcome.converged;
    if (!outcome.note.empty() && notes.find(outcome.note) == std::string::npos) {
      notes += (notes.empty() ? "" : "; ") + outcome.note;
    }
    if (std::isfinite(outcome.value) && outcome.value > best) {
      best = outcome.value;
      best_f = start;
    }
  }
  normalize(best_f, eval);

  LsiResult out;
  out.c_ls = best;
  out.lower_bound = std::max(gap.c_p, best);
  out.upper_bound = std::numeric_limits<double>::infinity();
  out.c_p = gap.c_p;
  out.nodes = nodes;
  out.extremal_values = std::move(best_f);
  out.restarts_used = used;
  out.converged = converged;
  out.diagnostics = notes;
  return out;
}

LsiResult lsi_constant(const PiecewisePotential& pot, double t, const GridSpec& grid, const LsiOptions& opts) {
  if (!(t >= 0.0)) throw InvalidInput("temperature t must be >= 0");
  const Assembly problem = assemble(pot, t, grid);
  const SpectralResult gap = solve_gap(problem);
  LsiResult out = maximize_lsi_quotient(problem, gap, opts);
  if (opts.rothaus_upper) {
    if (t == 0.0) {
      out.upper_bound = neumann_baseline(pot.plateau_left(), pot.plateau_right()).c_p;
    } else {
      try {
        const auto [a, b] = defective_lsi_components(pot, t, grid);
        out.upper_bound = rothaus_tighten(a, b, gap.c_p);
      } catch (const InvalidInput&) {
        out.upper_bound = std::numeric_limits<double>::infinity();
      }
    }
  }
  return out;
}

double rothaus_tighten(double a, double b, double c_p) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(c_p >= 0.0)) throw InvalidInput("Rothaus constants must be >= 0");
  return a + 0.5 * b * c_p;
}

DefectiveLsi defective_lsi_components(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  const auto ka = pot.kappa_left();
  const auto kb = pot.kappa_right();
  if (!ka || !kb) throw InvalidInput("defective LSI components need quadratic wings");
  if (!(t > 0.0)) throw InvalidInput("temperature t must be > 0");
  const GibbsRule rule(pot, t, build_nodes(pot, t, grid));
  double left = 0.0;
  double middle = 0.0;
  double right = 0.0;
  const auto x = rule.points();
  const auto w = rule.weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < pot.plateau_left()) {
      left += w[i];
    } else if (x[i] > pot.plateau_right()) {
      right += w[i];
    } else {
      middle += w[i];
    }
  }
  const double z = left + middle + right;
  double a = std::max(t / *ka, t / *kb);
  double b = std::log(z / left) + std::log(z / right);
  if (!pot.degenerate()) {
    const double len = pot.width();
    a = std::max(a, len * len / (std::numbers::pi * std::numbers::pi));
    b += std::log(z / middle);
  }
  return {a, b};
}

}  // namespace spectra
