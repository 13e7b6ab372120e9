#pragma once

// Direct access to each kernel variant, for equivalence tests and benchmarks.

#include "spectra/kernels.hpp"

#define SPECTRA_DECLARE_KERNELS                                                               \
  void gibbs_weight(const PlateauProfile& v, double inv_t, std::span<const double> x,         \
                    std::span<double> out);                                                   \
  void gibbs_drift(const PlateauProfile& v, double inv_t, std::span<const double> x,          \
                   std::span<double> out);                                                    \
  Moments weighted_moments(std::span<const double> w, std::span<const double> f);             \
  double entropy_sum(std::span<const double> w, std::span<const double> f, double log_m,      \
                     double floor);                                                           \
  void entropy_gradient(std::span<const double> w, std::span<const double> f, double log_m,   \
                        double floor, std::span<double> out);                                 \
  void tridiag_matvec(std::span<const double> diag, std::span<const double> off,              \
                      std::span<const double> x, std::span<double> y);

namespace spectra::kernels::scalar {
SPECTRA_DECLARE_KERNELS
}

#if defined(SPECTRA_HAVE_AVX2)
namespace spectra::kernels::avx2 {
SPECTRA_DECLARE_KERNELS
}
#endif

#undef SPECTRA_DECLARE_KERNELS
