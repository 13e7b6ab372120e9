// AVX2 variants. Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "spectra/detail/kernel_variants.hpp"

namespace spectra::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// log for positive normal inputs: x = 2^e m, m in [sqrt(1/2), sqrt(2)),
// log m = 2 atanh(s) with s = (m - 1)/(m + 1), |s| <= 0.1716.
inline __m256d vlog(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  const __m256d two52 = set1(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, set1(1023.0));

  const __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, set1(1.0)));

  const __m256d one = set1(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = set1(1.0 / 21.0);
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, set1(1.0 / 3.0));
  // log m = 2s + 2s z p'
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d tail = _mm256_mul_pd(_mm256_mul_pd(two_s, z), p);

  const __m256d ln2_hi = set1(6.93147180369123816490e-01);
  const __m256d ln2_lo = set1(1.90821492927058770002e-10);
  __m256d r = _mm256_fmadd_pd(e, ln2_lo, tail);
  r = _mm256_add_pd(r, two_s);
  return _mm256_fmadd_pd(e, ln2_hi, r);
}

// exp with flush to zero below -708 (weights there are irrelevant in double).
inline __m256d vexp(__m256d y) {
  const __m256d lo = set1(-708.0);
  const __m256d under = _mm256_cmp_pd(y, lo, _CMP_LT_OQ);
  y = _mm256_min_pd(_mm256_max_pd(y, lo), set1(709.0));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(y, set1(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, set1(6.93147180369123816490e-01), y);
  r = _mm256_fnmadd_pd(n, set1(1.90821492927058770002e-10), r);

  __m256d p = set1(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, set1(0.5));
  p = _mm256_fmadd_pd(p, r, set1(1.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0));

  const __m256d biased = _mm256_add_pd(_mm256_add_pd(n, set1(1023.0)), set1(4503599627370496.0));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52));
  return _mm256_andnot_pd(under, _mm256_mul_pd(p, scale));
}

// r^q for r > 0.
inline __m256d vpow(__m256d r, double q) {
  if (q == 0.0) return set1(1.0);
  if (q == 1.0) return r;
  if (q == 2.0) return _mm256_mul_pd(r, r);
  if (q == 3.0) return _mm256_mul_pd(_mm256_mul_pd(r, r), r);
  if (q == 4.0) {
    const __m256d r2 = _mm256_mul_pd(r, r);
    return _mm256_mul_pd(r2, r2);
  }
  return vexp(_mm256_mul_pd(set1(q), vlog(r)));
}

inline __m256d wing_value(std::span<const PowerTerm> terms, __m256d r) {
  __m256d v = _mm256_setzero_pd();
  for (const auto& term : terms) v = _mm256_fmadd_pd(set1(term.coefficient), vpow(r, term.exponent), v);
  return v;
}

inline __m256d wing_slope(std::span<const PowerTerm> terms, __m256d r) {
  __m256d d = _mm256_setzero_pd();
  for (const auto& term : terms) {
    d = _mm256_fmadd_pd(set1(term.coefficient * term.exponent), vpow(r, term.exponent - 1.0), d);
  }
  return d;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Distances to the plateau on each side, clamped away from zero so that the
// transcendental path stays finite in lanes that are masked out afterwards.
struct SideDistances {
  __m256d r_right, r_left, in_right, in_left;
};

inline SideDistances side_distances(const PlateauProfile& v, __m256d x) {
  const __m256d tiny = set1(1e-300);
  const __m256d right = set1(v.right);
  const __m256d left = set1(v.left);
  return {_mm256_max_pd(_mm256_sub_pd(x, right), tiny), _mm256_max_pd(_mm256_sub_pd(left, x), tiny),
          _mm256_cmp_pd(x, right, _CMP_GT_OQ), _mm256_cmp_pd(x, left, _CMP_LT_OQ)};
}

}  // namespace

void gibbs_weight(const PlateauProfile& v, double inv_t, std::span<const double> x,
                  std::span<double> out) {
  const std::size_t n = x.size();
  const std::size_t body = n - n % kLanes;
  const __m256d neg_inv_t = set1(-inv_t);
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256d xi = _mm256_loadu_pd(x.data() + i);
    const auto d = side_distances(v, xi);
    const __m256d vr = _mm256_and_pd(d.in_right, wing_value(v.right_terms, d.r_right));
    const __m256d vl = _mm256_and_pd(d.in_left, wing_value(v.left_terms, d.r_left));
    _mm256_storeu_pd(out.data() + i, vexp(_mm256_mul_pd(_mm256_add_pd(vr, vl), neg_inv_t)));
  }
  if (body < n) scalar::gibbs_weight(v, inv_t, x.subspan(body), out.subspan(body));
}

void gibbs_drift(const PlateauProfile& v, double inv_t, std::span<const double> x,
                 std::span<double> out) {
  const std::size_t n = x.size();
  const std::size_t body = n - n % kLanes;
  const __m256d neg_inv_t = set1(-inv_t);
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256d xi = _mm256_loadu_pd(x.data() + i);
    const auto d = side_distances(v, xi);
    const __m256d gr = _mm256_and_pd(d.in_right, wing_slope(v.right_terms, d.r_right));
    const __m256d gl = _mm256_and_pd(d.in_left, wing_slope(v.left_terms, d.r_left));
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_sub_pd(gr, gl), neg_inv_t));
  }
  if (body < n) scalar::gibbs_drift(v, inv_t, x.subspan(body), out.subspan(body));
}

Moments weighted_moments(std::span<const double> w, std::span<const double> f) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  __m256d m0 = _mm256_setzero_pd(), m1 = _mm256_setzero_pd(), m2 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256d wi = _mm256_loadu_pd(w.data() + i);
    const __m256d fi = _mm256_loadu_pd(f.data() + i);
    const __m256d wf = _mm256_mul_pd(wi, fi);
    m0 = _mm256_add_pd(m0, wi);
    m1 = _mm256_add_pd(m1, wf);
    m2 = _mm256_fmadd_pd(wf, fi, m2);
  }
  Moments m{hsum(m0), hsum(m1), hsum(m2)};
  if (body < n) {
    const auto rest = scalar::weighted_moments(w.subspan(body), f.subspan(body));
    m.mass += rest.mass;
    m.first += rest.first;
    m.second += rest.second;
  }
  return m;
}

double entropy_sum(std::span<const double> w, std::span<const double> f, double log_m,
                   double floor) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  const __m256d lm = set1(log_m);
  const __m256d fl = set1(floor);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256d fi = _mm256_loadu_pd(f.data() + i);
    const __m256d y = _mm256_max_pd(_mm256_mul_pd(fi, fi), fl);
    const __m256d wy = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), y);
    acc = _mm256_fmadd_pd(wy, _mm256_sub_pd(vlog(y), lm), acc);
  }
  double s = hsum(acc);
  if (body < n) s += scalar::entropy_sum(w.subspan(body), f.subspan(body), log_m, floor);
  return s;
}

void entropy_gradient(std::span<const double> w, std::span<const double> f, double log_m,
                      double floor, std::span<double> out) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  const __m256d lm = set1(log_m);
  const __m256d fl = set1(floor);
  const __m256d two = set1(2.0);
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256d fi = _mm256_loadu_pd(f.data() + i);
    const __m256d y = _mm256_max_pd(_mm256_mul_pd(fi, fi), fl);
    const __m256d wf2 = _mm256_mul_pd(_mm256_mul_pd(two, _mm256_loadu_pd(w.data() + i)), fi);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(wf2, _mm256_sub_pd(vlog(y), lm)));
  }
  if (body < n) {
    scalar::entropy_gradient(w.subspan(body), f.subspan(body), log_m, floor, out.subspan(body));
  }
}

void tridiag_matvec(std::span<const double> diag, std::span<const double> off,
                    std::span<const double> x, std::span<double> y) {
  const std::size_t n = diag.size();
  if (n < 2 + kLanes) {
    scalar::tridiag_matvec(diag, off, x, y);
    return;
  }
  y[0] = diag[0] * x[0] + off[0] * x[1];
  std::size_t i = 1;
  for (; i + kLanes < n; i += kLanes) {
    const __m256d lo = _mm256_mul_pd(_mm256_loadu_pd(off.data() + i - 1), _mm256_loadu_pd(x.data() + i - 1));
    const __m256d mid = _mm256_fmadd_pd(_mm256_loadu_pd(diag.data() + i), _mm256_loadu_pd(x.data() + i), lo);
    const __m256d res = _mm256_fmadd_pd(_mm256_loadu_pd(off.data() + i), _mm256_loadu_pd(x.data() + i + 1), mid);
    _mm256_storeu_pd(y.data() + i, res);
  }
  for (; i + 1 < n; ++i) y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
  y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

}  // namespace spectra::kernels::avx2
