#include <cmath>
#include <cstddef>
#include <span>

#include "math_core.hpp"

// AVX2+FMA kernels. Each is the lane-parallel transcription of the scalar
// reference: one 4-lane accumulator combined as (l0+l2)+(l1+l3), scalar
// tail, and exp/log evaluated with the exact operation sequence of
// math_core.hpp. The equivalence suite asserts bitwise agreement.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace bayesot::kernels::avx2_impl {

namespace d = bayesot::kernels::detail;

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline double hsum(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d q = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
  return _mm_cvtsd_f64(q) + _mm_cvtsd_f64(_mm_unpackhi_pd(q, q));
}

inline double hmax(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d q = _mm_max_pd(lo, hi);
  const __m128d r = _mm_max_sd(q, _mm_unpackhi_pd(q, q));
  return _mm_cvtsd_f64(r);
}

inline double hmin(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d q = _mm_min_pd(lo, hi);
  const __m128d r = _mm_min_sd(q, _mm_unpackhi_pd(q, q));
  return _mm_cvtsd_f64(r);
}

inline __m256d pow2v(__m128i k) {
  const __m256i k64 = _mm256_cvtepi32_epi64(k);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_castsi256_pd(bits);
}

inline __m256d exp4(__m256d x) {
  const __m256d nd = _mm256_round_pd(_mm256_mul_pd(x, set1(d::kLog2E)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nd, set1(d::kExpC1), x);
  r = _mm256_fnmadd_pd(nd, set1(d::kExpC2), r);

  const __m256d xx = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(set1(d::kExpP0), xx, set1(d::kExpP1));
  p = _mm256_fmadd_pd(p, xx, set1(d::kExpP2));
  const __m256d px = _mm256_mul_pd(r, p);
  __m256d q = _mm256_fmadd_pd(set1(d::kExpQ0), xx, set1(d::kExpQ1));
  q = _mm256_fmadd_pd(q, xx, set1(d::kExpQ2));
  q = _mm256_fmadd_pd(q, xx, set1(d::kExpQ3));
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(q, px));
  e = _mm256_fmadd_pd(set1(2.0), e, set1(1.0));

  const __m128i n = _mm256_cvtpd_epi32(nd);
  const __m128i sign = _mm_srli_epi32(n, 31);
  const __m128i n1 = _mm_srai_epi32(_mm_add_epi32(n, sign), 1);  // trunc(n/2)
  const __m128i n2 = _mm_sub_epi32(n, n1);
  e = _mm256_mul_pd(e, pow2v(n1));
  e = _mm256_mul_pd(e, pow2v(n2));

  e = _mm256_blendv_pd(e, _mm256_setzero_pd(), _mm256_cmp_pd(x, set1(d::kExpMin), _CMP_LT_OQ));
  e = _mm256_blendv_pd(e, set1(std::numeric_limits<double>::infinity()),
                       _mm256_cmp_pd(x, set1(d::kExpMax), _CMP_GT_OQ));
  e = _mm256_blendv_pd(e, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return e;
}

inline __m256d log4(__m256d x) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d subnormal =
      _mm256_and_pd(_mm256_cmp_pd(x, set1(std::numeric_limits<double>::min()), _CMP_LT_OQ),
                    _mm256_cmp_pd(x, zero, _CMP_GT_OQ));
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, set1(0x1p54)), subnormal);
  __m256d ed = _mm256_and_pd(subnormal, set1(-54.0));

  const __m256i bits = _mm256_castpd_si256(xs);
  const __m256i eraw = _mm256_srli_epi64(bits, 52);
  // exact int64 -> double for small nonnegative values
  const __m256d magic = set1(4503599627370496.0);  // 2^52
  const __m256d eraw_d = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(eraw, _mm256_castpd_si256(magic))), magic);
  ed = _mm256_add_pd(ed, _mm256_sub_pd(eraw_d, set1(1022.0)));

  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                      _mm256_set1_epi64x(0x3fe0000000000000LL)));

  const __m256d small = _mm256_cmp_pd(m, set1(d::kSqrtHalf), _CMP_LT_OQ);
  ed = _mm256_sub_pd(ed, _mm256_and_pd(small, set1(1.0)));
  m = _mm256_blendv_pd(_mm256_sub_pd(m, set1(1.0)),
                       _mm256_fmsub_pd(set1(2.0), m, set1(1.0)), small);

  const __m256d z = _mm256_mul_pd(m, m);
  __m256d p = _mm256_fmadd_pd(set1(d::kLogP0), m, set1(d::kLogP1));
  p = _mm256_fmadd_pd(p, m, set1(d::kLogP2));
  p = _mm256_fmadd_pd(p, m, set1(d::kLogP3));
  p = _mm256_fmadd_pd(p, m, set1(d::kLogP4));
  p = _mm256_fmadd_pd(p, m, set1(d::kLogP5));
  __m256d q = _mm256_add_pd(m, set1(d::kLogQ1));
  q = _mm256_fmadd_pd(q, m, set1(d::kLogQ2));
  q = _mm256_fmadd_pd(q, m, set1(d::kLogQ3));
  q = _mm256_fmadd_pd(q, m, set1(d::kLogQ4));
  q = _mm256_fmadd_pd(q, m, set1(d::kLogQ5));

  __m256d y = _mm256_mul_pd(m, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(set1(0.5), z, y);
  __m256d r = _mm256_add_pd(m, y);
  r = _mm256_fnmadd_pd(ed, set1(d::kLn2Lo), r);
  r = _mm256_fmadd_pd(ed, set1(d::kLn2Hi), r);

  const __m256d inf = set1(std::numeric_limits<double>::infinity());
  r = _mm256_blendv_pd(r, set1(std::numeric_limits<double>::quiet_NaN()),
                       _mm256_cmp_pd(x, zero, _CMP_LT_OQ));
  r = _mm256_blendv_pd(r, _mm256_sub_pd(zero, inf), _mm256_cmp_pd(x, zero, _CMP_EQ_OQ));
  r = _mm256_blendv_pd(r, inf, _mm256_cmp_pd(x, inf, _CMP_EQ_OQ));
  r = _mm256_blendv_pd(r, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return r;
}

}  // namespace

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

double max(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc = set1(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x.data() + i));
  double s = hmax(acc);
  for (; i < n; ++i) s = s > x[i] ? s : x[i];
  return s;
}

double min(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc = set1(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x.data() + i));
  double s = hmin(acc);
  for (; i < n; ++i) s = s < x[i] ? s : x[i];
  return s;
}

double logsumexp(std::span<const double> x) {
  const double m = max(x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  if (m == std::numeric_limits<double>::infinity()) return m;

  const std::size_t n = x.size();
  const __m256d mv = set1(m);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, exp4(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), mv)));
  double s = hsum(acc);
  for (; i < n; ++i) s += d::exp_core_impl(x[i] - m);
  return m + d::log_core_impl(s);
}

double xlogy_sum(std::span<const double> a, std::span<const double> x) {
  const std::size_t n = x.size();
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_loadu_pd(a.data() + i);
    const __m256d lv = log4(_mm256_loadu_pd(x.data() + i));
    const __m256d cand = _mm256_fmadd_pd(av, lv, acc);
    acc = _mm256_blendv_pd(cand, acc, _mm256_cmp_pd(av, zero, _CMP_EQ_OQ));
  }
  double s = hsum(acc);
  for (; i < n; ++i)
    if (a[i] != 0.0) s = std::fma(a[i], d::log_core_impl(x[i]), s);
  return s;
}

void exp_to(std::span<double> dst, std::span<const double> src) {
  const std::size_t n = src.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst.data() + i, exp4(_mm256_loadu_pd(src.data() + i)));
  for (; i < n; ++i) dst[i] = d::exp_core_impl(src[i]);
}

void log_to(std::span<double> dst, std::span<const double> src) {
  const std::size_t n = src.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst.data() + i, log4(_mm256_loadu_pd(src.data() + i)));
  for (; i < n; ++i) dst[i] = d::log_core_impl(src[i]);
}

void sub_scale_to(std::span<double> dst, std::span<const double> x, std::span<const double> y,
                  double s) {
  const std::size_t n = x.size();
  const __m256d sv = set1(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i)), sv);
    _mm256_storeu_pd(dst.data() + i, v);
  }
  for (; i < n; ++i) dst[i] = (x[i] - y[i]) * s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d av = set1(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_fmadd_pd(av, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, v);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

}  // namespace bayesot::kernels::avx2_impl

#endif  // x86_64
