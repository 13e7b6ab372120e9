#include "spectra/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spectra/errors.hpp"
#include "spectra/format.hpp"
#include "spectra/kernels.hpp"

namespace spectra {

namespace {

// Solves the tridiagonal system (sub, diag, sup) x = rhs by Gaussian
// elimination with partial pivoting; robust for the nearly singular shifted
// matrices of inverse iteration.
std::vector<double> solve_tridiagonal_pivoting(std::vector<double> sub, std::vector<double> diag,
                                               std::vector<double> sup, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> sup2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(diag[i]) >= std::abs(sub[i])) {
      if (diag[i] == 0.0) diag[i] = std::numeric_limits<double>::min();
      const double f = sub[i] / diag[i];
      diag[i + 1] -= f * sup[i];
      rhs[i + 1] -= f * rhs[i];
      sub[i] = 0.0;
    } else {
      const double f = diag[i] / sub[i];
      diag[i] = sub[i];
      const double tmp = diag[i + 1];
      diag[i + 1] = sup[i] - f * tmp;
      if (i + 2 < n) {
        sup2[i] = sup[i + 1];
        sup[i + 1] = -f * sup2[i];
      }
      sup[i] = tmp;
      std::swap(rhs[i], rhs[i + 1]);
      rhs[i + 1] -= f * rhs[i];
    }
  }
  if (diag[n - 1] == 0.0) diag[n - 1] = std::numeric_limits<double>::min();
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  if (n >= 2) x[n - 2] = (rhs[n - 2] - sup[n - 2] * x[n - 1]) / diag[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) {
    x[k] = (rhs[k] - sup[k] * x[k + 1] - sup2[k] * x[k + 2]) / diag[k];
  }
  return x;
}

// Thomas algorithm for a symmetric positive definite tridiagonal matrix.
void solve_spd_tridiagonal(std::span<const double> diag, std::span<const double> off,
                           std::span<const double> rhs, std::span<double> x) {
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

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

void SymTridiagonal::multiply(std::span<const double> x, std::span<double> y) const {
  kernels::tridiag_matvec(diag, off, x, y);
}

double SymTridiagonal::quadratic_form(std::span<const double> x) const {
  std::vector<double> y(x.size());
  multiply(x, y);
  return dot(x, y);
}

double WeightedMesh::total_weight() const {
  return std::accumulate(node_weights.begin(), node_weights.end(), 0.0);
}

Assembly assemble_on_nodes(const PiecewisePotential& pot, double t, std::vector<double> nodes) {
  if (nodes.size() < 2) throw InvalidInput("assembly needs a mesh with at least two nodes");
  const GibbsRule rule(pot, t, nodes);
  const std::size_t n = nodes.size();
  Assembly out;
  out.stiffness.diag.assign(n, 0.0);
  out.stiffness.off.assign(n - 1, 0.0);
  out.mass.diag.assign(n, 0.0);
  out.mass.off.assign(n - 1, 0.0);
  out.mesh.cell_weights.assign(n - 1, 0.0);
  out.mesh.node_weights.assign(n, 0.0);

  const auto x = rule.points();
  const auto w = rule.weights();
  constexpr int q_per_cell = GibbsRule::kOrder;
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double x0 = nodes[c];
    const double h = nodes[c + 1] - x0;
    double cw = 0.0;
    double m00 = 0.0;
    double m01 = 0.0;
    double m11 = 0.0;
    for (int q = 0; q < q_per_cell; ++q) {
      const std::size_t i = c * q_per_cell + q;
      const double right = (x[i] - x0) / h;
      const double left = 1.0 - right;
      cw += w[i];
      m00 += w[i] * left * left;
      m01 += w[i] * left * right;
      m11 += w[i] * right * right;
    }
    const double k = cw / (h * h);
    out.stiffness.diag[c] += k;
    out.stiffness.diag[c + 1] += k;
    out.stiffness.off[c] = -k;
    out.mass.diag[c] += m00;
    out.mass.diag[c + 1] += m11;
    out.mass.off[c] = m01;
    out.mesh.cell_weights[c] = cw;
    out.mesh.node_weights[c] += m00 + m01;
    out.mesh.node_weights[c + 1] += m01 + m11;
  }
  out.mesh.nodes = std::move(nodes);
  out.quad_points.assign(x.begin(), x.end());
  out.quad_weights.assign(w.begin(), w.end());
  return out;
}

Assembly assemble(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  return assemble_on_nodes(pot, t, build_nodes(pot, t, grid));
}

int count_eigenvalues_below(const SymTridiagonal& k, const SymTridiagonal& m, double sigma) {
  const std::size_t n = k.size();
  int count = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = k.diag[i] - sigma * m.diag[i];
    if (i == 0) {
      d = a;
    } else {
      const double e = k.off[i - 1] - sigma * m.off[i - 1];
      d = a - e * e / d;
    }
    if (d == 0.0) d = -std::numeric_limits<double>::epsilon() * (std::abs(k.diag[i]) + std::abs(sigma * m.diag[i]));
    if (d < 0.0) ++count;
  }
  return count;
}

namespace {

// K v for a stiffness matrix (zero row sums) written through nodal
// differences, which avoids the cancellation of diag * v against the
// off-diagonal terms when v is smooth and cells are tiny.
void stiffness_apply(const SymTridiagonal& k, std::span<const double> v, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double flux = k.off[i] * (v[i + 1] - v[i]);
    out[i] += flux;
    out[i + 1] -= flux;
  }
}

}  // namespace

SpectralResult solve_gap(const Assembly& problem) {
  const auto& K = problem.stiffness;
  const auto& M = problem.mass;
  const std::size_t n = K.size();
  if (n < 2) throw InvalidInput("eigenproblem needs at least two nodes");

  double hi = 1.0;
  for (int i = 0; i < 400 && count_eigenvalues_below(K, M, hi) < 2; ++i) hi *= 4.0;
  double lo = hi;
  for (int i = 0; i < 400 && count_eigenvalues_below(K, M, lo) >= 2; ++i) lo *= 0.25;
  if (count_eigenvalues_below(K, M, hi) < 2 || count_eigenvalues_below(K, M, lo) >= 2) {
    throw NumericalError("could not bracket the spectral gap");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (count_eigenvalues_below(K, M, mid) >= 2 ? hi : lo) = mid;
  }
  const double sigma = 0.5 * (lo + hi);
  if (!(sigma > 0.0)) throw NumericalError("nonpositive spectral gap: assembly is inconsistent");

  const auto& nodes = problem.mesh.nodes;
  const auto& lumped = problem.mesh.node_weights;
  const double total = problem.mesh.total_weight();
  std::vector<double> ones(n, 1.0);
  std::vector<double> m_ones(n);
  M.multiply(ones, m_ones);
  const double ones_norm = dot(ones, m_ones);

  std::vector<double> v(n);
  const double center = dot(lumped, nodes) / total;
  for (std::size_t i = 0; i < n; ++i) v[i] = nodes[i] - center;

  // Solve in the variables M_ii^(1/2) x so that the pivoted elimination sees a
  // matrix with unit mass diagonal; otherwise far-wing rows with tiny weights
  // dominate the backward error.
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(M.diag[i]);
  std::vector<double> sub(n - 1);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = (K.diag[i] - sigma * M.diag[i]) / M.diag[i];
  for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = (K.off[i] - sigma * M.off[i]) / (root[i] * root[i + 1]);

  std::vector<double> mv(n);
  std::vector<double> kv(n);
  std::vector<double> best;
  double lambda = sigma;
  double residual = std::numeric_limits<double>::infinity();
  double previous = residual;
  for (int it = 0; it < 12; ++it) {
    M.multiply(v, mv);
    for (std::size_t i = 0; i < n; ++i) mv[i] /= root[i];
    v = solve_tridiagonal_pivoting(sub, diag, sub, mv);
    for (std::size_t i = 0; i < n; ++i) v[i] /= root[i];
    M.multiply(v, mv);
    const double shift = dot(ones, mv) / ones_norm;
    for (double& value : v) value -= shift;
    const double scale = norm(v);
    for (double& value : v) value /= scale;

    M.multiply(v, mv);
    stiffness_apply(K, v, kv);
    const double rq = dot(v, kv) / dot(v, mv);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (kv[i] - rq * mv[i]) * (kv[i] - rq * mv[i]);
    const double next = std::sqrt(r2) / norm(mv);
    if (next < residual) {
      residual = next;
      lambda = rq;
      best = v;
    }
    if (it >= 1 && (next <= 1e-12 || next >= 0.5 * previous)) break;
    previous = next;
  }
  v = std::move(best);
  if (!(lambda > 0.0)) throw NumericalError("nonpositive spectral gap: assembly is inconsistent");
  if (!(residual <= 1e-8)) {
    throw NumericalError("inverse iteration did not converge (residual " + format_double(residual) + ")");
  }

  double orient = 0.0;
  for (std::size_t i = 0; i < n; ++i) orient += lumped[i] * v[i] * (nodes[i] - center);
  const double scale = std::sqrt(total / M.quadratic_form(v)) * (orient < 0.0 ? -1.0 : 1.0);
  for (double& value : v) value *= scale;

  return {lambda, 1.0 / lambda, nodes, std::move(v), residual, static_cast<int>(n)};
}

SpectralResult poincare_constant(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  return solve_gap(assemble(pot, t, grid));
}

NeumannBaseline neumann_baseline(double a, double b) {
  if (!(a < b)) throw InvalidInput("Neumann baseline needs a < b");
  const double len = b - a;
  const double mid = 0.5 * (a + b);
  return {len * len / (std::numbers::pi * std::numbers::pi),
          [=](double x) { return std::sin(std::numbers::pi * (x - mid) / len); }};
}

double surrogate_constant(const PiecewisePotential& pot, double t, const GridSpec& grid) {
  const auto ka = pot.kappa_left();
  const auto kb = pot.kappa_right();
  if (!ka || !kb) throw InvalidInput("surrogate constant needs quadratic wings");
  if (pot.degenerate()) throw InvalidInput("surrogate constant needs a plateau with a < b");
  if (!(t >= 0.0)) throw InvalidInput("temperature t must be >= 0");
  grid.validate();

  const int cells = grid.n_plateau;
  const std::size_t n = static_cast<std::size_t>(cells) + 1;
  const double h = pot.width() / cells;
  SymTridiagonal K{std::vector<double>(n, 2.0 / h), std::vector<double>(n - 1, -1.0 / h)};
  K.diag.front() = K.diag.back() = 1.0 / h;
  SymTridiagonal M{std::vector<double>(n, 4.0 * h / 6.0), std::vector<double>(n - 1, h / 6.0)};
  M.diag.front() = M.diag.back() = 2.0 * h / 6.0;
  const double layer = std::sqrt(std::numbers::pi * t / 2.0);
  M.diag.front() += layer / std::sqrt(*ka);
  M.diag.back() += layer / std::sqrt(*kb);
  std::vector<double> c(n, h);
  c.front() = c.back() = 0.5 * h;
  const double c_sum = std::accumulate(c.begin(), c.end(), 0.0);

  // Dirichlet-pinned stiffness (node 0 removed) is SPD.
  std::span<const double> k_diag(K.diag.data() + 1, n - 1);
  std::span<const double> k_off(K.off.data() + 1, n - 2);

  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::sin(std::numbers::pi * (static_cast<double>(i) / cells - 0.5));
  std::vector<double> r(n);
  std::vector<double> y(n, 0.0);
  double value = 0.0;
  for (int it = 0; it < 1000; ++it) {
    M.multiply(g, r);
    const double mu = std::accumulate(r.begin(), r.end(), 0.0) / c_sum;
    for (std::size_t i = 0; i < n; ++i) r[i] -= mu * c[i];
    y[0] = 0.0;
    solve_spd_tridiagonal(k_diag, k_off, std::span<const double>(r.data() + 1, n - 1),
                          std::span<double>(y.data() + 1, n - 1));
    const double shift = dot(c, y) / c_sum;
    for (double& v : y) v -= shift;
    const double scale = norm(y);
    for (std::size_t i = 0; i < n; ++i) g[i] = y[i] / scale;
    const double next = M.quadratic_form(g) / K.quadratic_form(g);
    if (it > 3 && std::abs(next - value) <= 1e-15 * next) {
      value = next;
      break;
    }
    value = next;
  }
  return value;
}

std::optional<double> bakry_emery_bound(const PiecewisePotential& pot, double t) {
  if (!pot.degenerate()) return std::nullopt;
  const auto ka = pot.kappa_left();
  const auto kb = pot.kappa_right();
  if (!ka || !kb) return std::nullopt;
  return t / std::min(*ka, *kb);
}

double interpolate(std::span<const double> nodes, std::span<const double> values, double x) {
  if (x <= nodes.front()) return values.front();
  if (x >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
  const double s = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
  return values[i] + s * (values[i + 1] - values[i]);
}

}  // namespace spectra
