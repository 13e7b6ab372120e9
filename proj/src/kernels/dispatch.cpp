#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "spectra/detail/kernel_variants.hpp"

namespace spectra::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("SPECTRA_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SPECTRA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::runtime_error("instruction set not available: " + std::string(isa_name(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

#if defined(SPECTRA_HAVE_AVX2)
#define SPECTRA_DISPATCH(fn, ...) \
  (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define SPECTRA_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void gibbs_weight(const PlateauProfile& v, double inv_t, std::span<const double> x,
                  std::span<double> out) {
  SPECTRA_DISPATCH(gibbs_weight, v, inv_t, x, out);
}

void gibbs_drift(const PlateauProfile& v, double inv_t, std::span<const double> x,
                 std::span<double> out) {
  SPECTRA_DISPATCH(gibbs_drift, v, inv_t, x, out);
}

Moments weighted_moments(std::span<const double> w, std::span<const double> f) {
  return SPECTRA_DISPATCH(weighted_moments, w, f);
}

double entropy_sum(std::span<const double> w, std::span<const double> f, double log_m,
                   double floor) {
  return SPECTRA_DISPATCH(entropy_sum, w, f, log_m, floor);
}

void entropy_gradient(std::span<const double> w, std::span<const double> f, double log_m,
                      double floor, std::span<double> out) {
  SPECTRA_DISPATCH(entropy_gradient, w, f, log_m, floor, out);
}

void tridiag_matvec(std::span<const double> diag, std::span<const double> off,
                    std::span<const double> x, std::span<double> y) {
  SPECTRA_DISPATCH(tridiag_matvec, diag, off, x, y);
}

#undef SPECTRA_DISPATCH

}  // namespace spectra::kernels
