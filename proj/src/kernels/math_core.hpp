#ifndef BAYESOT_KERNELS_MATH_CORE_HPP
#define BAYESOT_KERNELS_MATH_CORE_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

// Cephes-style double precision exp/log cores. The AVX2 kernels replicate
// this exact operation sequence (same polynomial, same fma placement), so a
// lane of the vector path is bit-identical to the scalar path. exp results
// that would be subnormal are flushed to zero; accuracy over the normal
// range is ~1-2 ulp, which the equivalence and accuracy suites pin down.

namespace bayesot::kernels::detail {

// exp constants
inline constexpr double kLog2E = 1.4426950408889634073599;
inline constexpr double kExpC1 = 6.93145751953125e-1;
inline constexpr double kExpC2 = 1.42860682030941723212e-6;
inline constexpr double kExpMax = 709.782712893383996843;   // log(DBL_MAX)
inline constexpr double kExpMin = -708.396418532264106224;  // log(smallest normal)
inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;
inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;

// log constants
inline constexpr double kSqrtHalf = 0.70710678118654752440;
inline constexpr double kLn2Hi = 0.693359375;
inline constexpr double kLn2Lo = 2.121944400546905827679e-4;
inline constexpr double kLogP0 = 1.01875663804580931796e-4;
inline constexpr double kLogP1 = 4.97494994976747001425e-1;
inline constexpr double kLogP2 = 4.70579119878881725854e0;
inline constexpr double kLogP3 = 1.44989225341610930846e1;
inline constexpr double kLogP4 = 1.79368678507819816313e1;
inline constexpr double kLogP5 = 7.70838733755885391666e0;
inline constexpr double kLogQ1 = 1.12873587189167450590e1;
inline constexpr double kLogQ2 = 4.52279145837532221105e1;
inline constexpr double kLogQ3 = 8.29875266912776603211e1;
inline constexpr double kLogQ4 = 7.11544750618563894466e1;
inline constexpr double kLogQ5 = 2.31251620126765340583e1;

inline double pow2i(int k) {
  // k in [-1022, 1023]
  return std::bit_cast<double>(static_cast<std::uint64_t>(1023 + k) << 52);
}

inline double exp_core_impl(double x) {
  if (std::isnan(x)) return x;
  if (x > kExpMax) return std::numeric_limits<double>::infinity();
  if (x < kExpMin) return 0.0;

  const double nd = std::nearbyint(x * kLog2E);
  double r = std::fma(-nd, kExpC1, x);
  r = std::fma(-nd, kExpC2, r);

  const double xx = r * r;
  double p = std::fma(kExpP0, xx, kExpP1);
  p = std::fma(p, xx, kExpP2);
  const double px = r * p;
  double q = std::fma(kExpQ0, xx, kExpQ1);
  q = std::fma(q, xx, kExpQ2);
  q = std::fma(q, xx, kExpQ3);
  double e = px / (q - px);
  e = std::fma(2.0, e, 1.0);

  const int n = static_cast<int>(nd);
  const int n1 = n / 2;  // truncating split keeps both factors in range
  const int n2 = n - n1;
  return e * pow2i(n1) * pow2i(n2);
}

inline double log_core_impl(double x) {
  if (std::isnan(x)) return x;
  if (x == std::numeric_limits<double>::infinity()) return x;
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();

  int e = 0;
  if (x < std::numeric_limits<double>::min()) {  // subnormal input
    x *= 0x1p54;
    e = -54;
  }
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  e += static_cast<int>(bits >> 52) - 1022;
  double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) | 0x3fe0000000000000ULL);

  if (m < kSqrtHalf) {
    e -= 1;
    m = std::fma(2.0, m, -1.0);
  } else {
    m = m - 1.0;
  }

  const double z = m * m;
  double p = std::fma(kLogP0, m, kLogP1);
  p = std::fma(p, m, kLogP2);
  p = std::fma(p, m, kLogP3);
  p = std::fma(p, m, kLogP4);
  p = std::fma(p, m, kLogP5);
  double q = m + kLogQ1;
  q = std::fma(q, m, kLogQ2);
  q = std::fma(q, m, kLogQ3);
  q = std::fma(q, m, kLogQ4);
  q = std::fma(q, m, kLogQ5);

  double y = m * (z * p / q);
  y = std::fma(-0.5, z, y);
  double r = m + y;
  const double ed = static_cast<double>(e);
  r = std::fma(-ed, kLn2Lo, r);
  r = std::fma(ed, kLn2Hi, r);
  return r;
}

}  // namespace bayesot::kernels::detail

#endif
