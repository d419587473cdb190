#include "bayesot/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "math_core.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define BAYESOT_X86_64 1
#endif

namespace bayesot::kernels {

namespace scalar_impl {
double sum(std::span<const double>);
double dot(std::span<const double>, std::span<const double>);
double max(std::span<const double>);
double min(std::span<const double>);
double logsumexp(std::span<const double>);
double xlogy_sum(std::span<const double>, std::span<const double>);
void exp_to(std::span<double>, std::span<const double>);
void log_to(std::span<double>, std::span<const double>);
void sub_scale_to(std::span<double>, std::span<const double>, std::span<const double>, double);
void axpy(double, std::span<const double>, std::span<double>);
}  // namespace scalar_impl

#ifdef BAYESOT_X86_64
namespace avx2_impl {
double sum(std::span<const double>);
double dot(std::span<const double>, std::span<const double>);
double max(std::span<const double>);
double min(std::span<const double>);
double logsumexp(std::span<const double>);
double xlogy_sum(std::span<const double>, std::span<const double>);
void exp_to(std::span<double>, std::span<const double>);
void log_to(std::span<double>, std::span<const double>);
void sub_scale_to(std::span<double>, std::span<const double>, std::span<const double>, double);
void axpy(double, std::span<const double>, std::span<double>);
}  // namespace avx2_impl
#endif

namespace {

Backend detect_default() {
  const char* env = std::getenv("BAYESOT_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0) return avx2_available() ? Backend::avx2 : Backend::scalar;
    // "auto" or anything else falls through to detection
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{detect_default()};
  return slot;
}

}  // namespace

bool avx2_available() {
#ifdef BAYESOT_X86_64
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available())
    throw std::runtime_error("kernels: AVX2 backend not supported on this CPU");
  backend_slot().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

#ifdef BAYESOT_X86_64
#define BAYESOT_DISPATCH(fn, ...)                                                      \
  (active_backend() == Backend::avx2 ? avx2_impl::fn(__VA_ARGS__) : scalar_impl::fn(__VA_ARGS__))
#else
#define BAYESOT_DISPATCH(fn, ...) scalar_impl::fn(__VA_ARGS__)
#endif

double sum(std::span<const double> x) { return BAYESOT_DISPATCH(sum, x); }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::dot: length mismatch");
  return BAYESOT_DISPATCH(dot, x, y);
}

double max(std::span<const double> x) { return BAYESOT_DISPATCH(max, x); }

double min(std::span<const double> x) { return BAYESOT_DISPATCH(min, x); }

double logsumexp(std::span<const double> x) { return BAYESOT_DISPATCH(logsumexp, x); }

double xlogy_sum(std::span<const double> a, std::span<const double> x) {
  if (a.size() != x.size()) throw std::invalid_argument("kernels::xlogy_sum: length mismatch");
  return BAYESOT_DISPATCH(xlogy_sum, a, x);
}

void exp_to(std::span<double> dst, std::span<const double> src) {
  if (dst.size() != src.size()) throw std::invalid_argument("kernels::exp_to: length mismatch");
  BAYESOT_DISPATCH(exp_to, dst, src);
}

void log_to(std::span<double> dst, std::span<const double> src) {
  if (dst.size() != src.size()) throw std::invalid_argument("kernels::log_to: length mismatch");
  BAYESOT_DISPATCH(log_to, dst, src);
}

void sub_scale_to(std::span<double> dst, std::span<const double> x, std::span<const double> y,
                  double s) {
  if (dst.size() != x.size() || x.size() != y.size())
    throw std::invalid_argument("kernels::sub_scale_to: length mismatch");
  BAYESOT_DISPATCH(sub_scale_to, dst, x, y, s);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
  BAYESOT_DISPATCH(axpy, a, x, y);
}

#undef BAYESOT_DISPATCH

namespace detail {
double exp_core(double x) { return exp_core_impl(x); }
double log_core(double x) { return log_core_impl(x); }
}  // namespace detail

}  // namespace bayesot::kernels
