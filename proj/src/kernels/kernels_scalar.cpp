#include <cmath>
#include <cstddef>
#include <span>

#include "math_core.hpp"

// Scalar reference kernels. Reductions accumulate in 4 independent lanes
// combined as (l0+l2)+(l1+l3) with a sequential tail, mirroring the AVX2
// variants lane for lane so both backends produce identical bits.

namespace bayesot::kernels::scalar_impl {

namespace {

inline double max_op(double acc, double x) { return acc > x ? acc : x; }  // vmaxpd semantics
inline double min_op(double acc, double x) { return acc < x ? acc : x; }  // vminpd semantics

}  // namespace

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
  }
  double s = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = std::fma(x[i], y[i], a0);
    a1 = std::fma(x[i + 1], y[i + 1], a1);
    a2 = std::fma(x[i + 2], y[i + 2], a2);
    a3 = std::fma(x[i + 3], y[i + 3], a3);
  }
  double s = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

double max(std::span<const double> x) {
  const std::size_t n = x.size();
  const double ninf = -std::numeric_limits<double>::infinity();
  double a0 = ninf, a1 = ninf, a2 = ninf, a3 = ninf;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = max_op(a0, x[i]);
    a1 = max_op(a1, x[i + 1]);
    a2 = max_op(a2, x[i + 2]);
    a3 = max_op(a3, x[i + 3]);
  }
  double s = max_op(max_op(a0, a2), max_op(a1, a3));
  for (; i < n; ++i) s = max_op(s, x[i]);
  return s;
}

double min(std::span<const double> x) {
  const std::size_t n = x.size();
  const double pinf = std::numeric_limits<double>::infinity();
  double a0 = pinf, a1 = pinf, a2 = pinf, a3 = pinf;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = min_op(a0, x[i]);
    a1 = min_op(a1, x[i + 1]);
    a2 = min_op(a2, x[i + 2]);
    a3 = min_op(a3, x[i + 3]);
  }
  double s = min_op(min_op(a0, a2), min_op(a1, a3));
  for (; i < n; ++i) s = min_op(s, x[i]);
  return s;
}

double logsumexp(std::span<const double> x) {
  const double m = max(x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  if (m == std::numeric_limits<double>::infinity()) return m;

  const std::size_t n = x.size();
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += detail::exp_core_impl(x[i] - m);
    a1 += detail::exp_core_impl(x[i + 1] - m);
    a2 += detail::exp_core_impl(x[i + 2] - m);
    a3 += detail::exp_core_impl(x[i + 3] - m);
  }
  double s = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) s += detail::exp_core_impl(x[i] - m);
  return m + detail::log_core_impl(s);
}

double xlogy_sum(std::span<const double> a, std::span<const double> x) {
  const std::size_t n = x.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    if (a[i] != 0.0) s0 = std::fma(a[i], detail::log_core_impl(x[i]), s0);
    if (a[i + 1] != 0.0) s1 = std::fma(a[i + 1], detail::log_core_impl(x[i + 1]), s1);
    if (a[i + 2] != 0.0) s2 = std::fma(a[i + 2], detail::log_core_impl(x[i + 2]), s2);
    if (a[i + 3] != 0.0) s3 = std::fma(a[i + 3], detail::log_core_impl(x[i + 3]), s3);
  }
  double s = (s0 + s2) + (s1 + s3);
  for (; i < n; ++i)
    if (a[i] != 0.0) s = std::fma(a[i], detail::log_core_impl(x[i]), s);
  return s;
}

void exp_to(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = detail::exp_core_impl(src[i]);
}

void log_to(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = detail::log_core_impl(src[i]);
}

void sub_scale_to(std::span<double> dst, std::span<const double> x, std::span<const double> y,
                  double s) {
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = (x[i] - y[i]) * s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::fma(a, x[i], y[i]);
}

}  // namespace bayesot::kernels::scalar_impl
