#ifndef BAYESOT_KERNELS_HPP
#define BAYESOT_KERNELS_HPP

#include <span>

namespace bayesot::kernels {

// Arithmetic inner loops used by the solvers and the sampler. Every kernel
// has a scalar reference implementation and an AVX2 variant selected at
// runtime. The two are bit-identical: same blocked accumulation order, same
// polynomial exp/log in both paths, FMA used symmetrically. Reductions are
// deterministic for a fixed input order on any backend.

enum class Backend { scalar, avx2 };

/// True when the CPU supports the AVX2+FMA kernels.
bool avx2_available();

/// Currently selected backend. Defaults to the best available one; the
/// BAYESOT_SIMD environment variable ("scalar", "avx2", "auto") overrides.
Backend active_backend();

/// Force a backend (throws if unsupported on this CPU). Intended for tests
/// and the equivalence suite.
void set_backend(Backend b);
const char* backend_name(Backend b);

/// sum_i x_i
double sum(std::span<const double> x);

/// sum_i x_i * y_i
double dot(std::span<const double> x, std::span<const double> y);

/// max_i x_i; -inf on empty input
double max(std::span<const double> x);

/// min_i x_i; +inf on empty input
double min(std::span<const double> x);

/// log(sum_i exp(x_i)), stabilized by the max; -inf on empty input
double logsumexp(std::span<const double> x);

/// sum_i a_i * log(x_i), where terms with a_i == 0 contribute 0 even at x_i == 0
double xlogy_sum(std::span<const double> a, std::span<const double> x);

/// dst_i = exp(src_i)
void exp_to(std::span<double> dst, std::span<const double> src);

/// dst_i = log(src_i)
void log_to(std::span<double> dst, std::span<const double> src);

/// dst_i = (x_i - y_i) * s
void sub_scale_to(std::span<double> dst, std::span<const double> x, std::span<const double> y,
                  double s);

/// y_i += a * x_i
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace detail {
// Scalar cores shared with the RNG (portable across platforms and backends).
double exp_core(double x);
double log_core(double x);
}  // namespace detail

}  // namespace bayesot::kernels

#endif
