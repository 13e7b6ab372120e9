#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference and, on
// x86-64, an AVX2 variant; the variant is picked once per process from CPU
// features (overridable with SPECTRA_ISA=scalar|avx2 or set_isa()).

#include <span>
#include <string_view>

namespace spectra::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
void set_isa(Isa isa);
bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

/// One term c * r^p of a wing profile.
struct PowerTerm {
  double coefficient;
  double exponent;

  bool operator==(const PowerTerm&) const = default;
};

/// Flattened plateau potential: zero on [left, right], sum of power terms in
/// the distance to the plateau outside it. Views are non-owning.
struct PlateauProfile {
  double left = 0.0;
  double right = 0.0;
  std::span<const PowerTerm> left_terms;
  std::span<const PowerTerm> right_terms;
};

struct Moments {
  double mass = 0.0;    // sum w
  double first = 0.0;   // sum w f
  double second = 0.0;  // sum w f^2
};

/// out[i] = exp(-V(x[i]) * inv_t)
void gibbs_weight(const PlateauProfile& v, double inv_t, std::span<const double> x,
                  std::span<double> out);

/// out[i] = -V'(x[i]) * inv_t
void gibbs_drift(const PlateauProfile& v, double inv_t, std::span<const double> x,
                 std::span<double> out);

Moments weighted_moments(std::span<const double> w, std::span<const double> f);

/// sum_i w_i y_i (log y_i - log_m) with y_i = max(f_i^2, floor).
double entropy_sum(std::span<const double> w, std::span<const double> f, double log_m,
                   double floor);

/// out_i = 2 w_i f_i (log y_i - log_m), the f-gradient of entropy_sum at fixed m.
void entropy_gradient(std::span<const double> w, std::span<const double> f, double log_m,
                      double floor, std::span<double> out);

/// y = T x for the symmetric tridiagonal T with the given diagonal and off-diagonal.
void tridiag_matvec(std::span<const double> diag, std::span<const double> off,
                    std::span<const double> x, std::span<double> y);

}  // namespace spectra::kernels
