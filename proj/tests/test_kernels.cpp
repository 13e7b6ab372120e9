#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spectra/detail/kernel_variants.hpp"
#include "spectra/potential.hpp"

using namespace spectra;
namespace k = spectra::kernels;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

bool close(double a, double b, double rel, double abs_tol = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_tol;
}

const std::size_t kSizes[] = {0, 1, 3, 4, 7, 33, 1001};

}  // namespace

TEST_CASE("dispatch reports a usable instruction set") {
  CHECK(k::isa_available(k::Isa::scalar));
  CHECK(k::isa_available(k::active_isa()));
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  const auto before = k::active_isa();
  k::set_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::set_isa(before);
}

#if defined(SPECTRA_HAVE_AVX2)

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::isa_available(k::Isa::avx2)) return;

  const PiecewisePotential pots[] = {
      potentials::counterexample(), potentials::quartic(), potentials::asymmetric(1.0, 4.0),
      PiecewisePotential(-1.0, 2.0, WingSpec::series({{0.5, 2.0}, {0.25, 3.0}}), WingSpec::power(2.0, 1.5))};

  for (const auto& pot : pots) {
    const auto profile = pot.profile();
    for (double t : {1.0, 1e-2, 1e-5}) {
      for (std::size_t n : kSizes) {
        const auto x = uniform(n, pot.plateau_left() - 2.0, pot.plateau_right() + 2.0, n + 11);
        std::vector<double> ws(n), wv(n), ds(n), dv(n);
        k::scalar::gibbs_weight(profile, 1.0 / t, x, ws);
        k::avx2::gibbs_weight(profile, 1.0 / t, x, wv);
        k::scalar::gibbs_drift(profile, 1.0 / t, x, ds);
        k::avx2::gibbs_drift(profile, 1.0 / t, x, dv);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(close(ws[i], wv[i], 1e-12, 1e-300));
          CHECK(close(ds[i], dv[i], 1e-12));
        }
      }
    }
  }
}

TEST_CASE("avx2 reductions agree with the scalar reference") {
  if (!k::isa_available(k::Isa::avx2)) return;
  for (std::size_t n : kSizes) {
    const auto w = uniform(n, 0.0, 1.0, 3 * n + 1);
    const auto f = uniform(n, -2.0, 2.0, 5 * n + 2);
    const auto ms = k::scalar::weighted_moments(w, f);
    const auto mv = k::avx2::weighted_moments(w, f);
    CHECK(close(ms.mass, mv.mass, 1e-13, 1e-300));
    CHECK(close(ms.first, mv.first, 1e-12, 1e-13));
    CHECK(close(ms.second, mv.second, 1e-13, 1e-300));

    const double log_m = std::log(1.3);
    CHECK(close(k::scalar::entropy_sum(w, f, log_m, 1e-30), k::avx2::entropy_sum(w, f, log_m, 1e-30), 1e-12,
                1e-13));
    std::vector<double> gs(n), gv(n);
    k::scalar::entropy_gradient(w, f, log_m, 1e-30, gs);
    k::avx2::entropy_gradient(w, f, log_m, 1e-30, gv);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(gs[i], gv[i], 1e-12, 1e-14));

    if (n == 0) continue;
    const auto diag = uniform(n, 1.0, 3.0, n + 7);
    const auto off = uniform(n - 1, -1.0, 0.0, n + 9);
    std::vector<double> ys(n), yv(n);
    k::scalar::tridiag_matvec(diag, off, f, ys);
    k::avx2::tridiag_matvec(diag, off, f, yv);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(ys[i], yv[i], 1e-13, 1e-14));
  }
}

TEST_CASE("entropy kernels handle zeros through the floor") {
  if (!k::isa_available(k::Isa::avx2)) return;
  const std::vector<double> w{0.25, 0.25, 0.25, 0.25, 0.5};
  const std::vector<double> f{0.0, 1.0, 0.0, 2.0, 1e-200};
  const double s = k::scalar::entropy_sum(w, f, 0.0, 1e-30);
  const double v = k::avx2::entropy_sum(w, f, 0.0, 1e-30);
  CHECK(std::isfinite(s));
  CHECK(close(s, v, 1e-12));
}

#endif

TEST_CASE("gibbs weight is exp(-V/t) and the drift is -V'/t") {
  const auto pot = potentials::counterexample();
  const auto profile = pot.profile();
  const std::vector<double> x{-3.0, -1.5, 0.0, 1.5707963267948966, 2.5, 4.0};
  std::vector<double> w(x.size()), d(x.size());
  k::gibbs_weight(profile, 10.0, x, w);
  k::gibbs_drift(profile, 10.0, x, d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(w[i] == doctest::Approx(std::exp(-pot.eval(x[i]) * 10.0)).epsilon(1e-13));
    CHECK(d[i] == doctest::Approx(-pot.eval_grad(x[i]) * 10.0).epsilon(1e-13));
  }
}
