#include <algorithm>
#include <cmath>

#include "spectra/detail/kernel_variants.hpp"

namespace spectra::kernels::scalar {
namespace {

double wing_value(std::span<const PowerTerm> terms, double r) {
  double v = 0.0;
  for (const auto& term : terms) v += term.coefficient * std::pow(r, term.exponent);
  return v;
}

double wing_slope(std::span<const PowerTerm> terms, double r) {
  double d = 0.0;
  for (const auto& term : terms) {
    const double q = term.exponent - 1.0;
    if (q == 0.0) {
      d += term.coefficient;
    } else if (r > 0.0) {
      d += term.coefficient * term.exponent * std::pow(r, q);
    }
  }
  return d;
}

}  // namespace

void gibbs_weight(const PlateauProfile& v, double inv_t, std::span<const double> x,
                  std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double pot = 0.0;
    if (xi > v.right) {
      pot = wing_value(v.right_terms, xi - v.right);
    } else if (xi < v.left) {
      pot = wing_value(v.left_terms, v.left - xi);
    }
    out[i] = std::exp(-pot * inv_t);
  }
}

void gibbs_drift(const PlateauProfile& v, double inv_t, std::span<const double> x,
                 std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double grad = 0.0;
    if (xi > v.right) {
      grad = wing_slope(v.right_terms, xi - v.right);
    } else if (xi < v.left) {
      grad = -wing_slope(v.left_terms, v.left - xi);
    }
    out[i] = -grad * inv_t;
  }
}

Moments weighted_moments(std::span<const double> w, std::span<const double> f) {
  Moments m;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wf = w[i] * f[i];
    m.mass += w[i];
    m.first += wf;
    m.second += wf * f[i];
  }
  return m;
}

double entropy_sum(std::span<const double> w, std::span<const double> f, double log_m,
                   double floor) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double y = std::max(f[i] * f[i], floor);
    s += w[i] * y * (std::log(y) - log_m);
  }
  return s;
}

void entropy_gradient(std::span<const double> w, std::span<const double> f, double log_m,
                      double floor, std::span<double> out) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double y = std::max(f[i] * f[i], floor);
    out[i] = 2.0 * w[i] * f[i] * (std::log(y) - log_m);
  }
}

void tridiag_matvec(std::span<const double> diag, std::span<const double> off,
                    std::span<const double> x, std::span<double> y) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  if (n == 1) {
    y[0] = diag[0] * x[0];
    return;
  }
  y[0] = diag[0] * x[0] + off[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
  }
  y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

}  // namespace spectra::kernels::scalar
