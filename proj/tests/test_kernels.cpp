#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "bayesot/kernels.hpp"

using namespace bayesot;
namespace k = bayesot::kernels;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_vec(std::mt19937_64& rng, size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

template <typename F>
void with_backend(k::Backend b, F&& f) {
  const k::Backend old = k::active_backend();
  k::set_backend(b);
  f();
  k::set_backend(old);
}

// Special values that exercise every edge branch of exp/log.
std::vector<double> special_values() {
  return {0.0,
          -0.0,
          1.0,
          -1.0,
          0.5,
          2.0,
          709.0,
          709.782712893383996843,
          710.0,
          1000.0,
          -708.0,
          -708.396418532264106224,
          -709.0,
          -746.0,
          -1000.0,
          1e-308,
          5e-324,  // subnormal
          2.2250738585072014e-308,
          1e308,
          -1e308,
          kInf,
          -kInf,
          std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::max(),
          std::numeric_limits<double>::min()};
}

}  // namespace

TEST_CASE("exp core matches std::exp to a few ulp on the normal range") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-700.0, 700.0);
  for (int i = 0; i < 20000; ++i) {
    const double x = dist(rng);
    const double got = k::detail::exp_core(x);
    const double want = std::exp(x);
    CAPTURE(x);
    CHECK(std::abs(got - want) <= 4e-16 * want);
  }
}

TEST_CASE("log core matches std::log to a few ulp over the positive range") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> expo(-307.0, 307.0);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::pow(10.0, expo(rng));
    const double got = k::detail::log_core(x);
    const double want = std::log(x);
    CAPTURE(x);
    CHECK(std::abs(got - want) <= 4e-16 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("exp/log core edge semantics") {
  CHECK(k::detail::exp_core(710.0) == kInf);
  CHECK(k::detail::exp_core(kInf) == kInf);
  CHECK(k::detail::exp_core(-746.0) == 0.0);
  CHECK(k::detail::exp_core(-kInf) == 0.0);
  CHECK(std::isnan(k::detail::exp_core(std::nan(""))));
  CHECK(k::detail::exp_core(0.0) == 1.0);

  CHECK(k::detail::log_core(0.0) == -kInf);
  CHECK(k::detail::log_core(-0.0) == -kInf);
  CHECK(std::isnan(k::detail::log_core(-1.0)));
  CHECK(k::detail::log_core(kInf) == kInf);
  CHECK(std::isnan(k::detail::log_core(std::nan(""))));
  CHECK(k::detail::log_core(1.0) == 0.0);
  // subnormal inputs go through the prescale path
  CHECK(k::detail::log_core(5e-324) == doctest::Approx(std::log(5e-324)).epsilon(1e-15));
}

TEST_CASE("scalar and avx2 backends produce identical bits" *
          doctest::skip(!k::avx2_available())) {
  std::mt19937_64 rng(7);

  for (size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 64, 67, 255}) {
    // values spanning many magnitudes, including negatives
    std::vector<double> x = random_vec(rng, n, -30.0, 30.0);
    std::vector<double> y = random_vec(rng, n, -2.0, 2.0);
    std::vector<double> pos = random_vec(rng, n, 0.0, 5.0);
    std::vector<double> mask = random_vec(rng, n, -1.0, 1.0);
    for (size_t i = 0; i + 2 < n; i += 3) mask[i] = 0.0;  // exercise the a==0 lanes

    double s_sum = 0, s_dot = 0, s_max = 0, s_min = 0, s_lse = 0, s_xlogy = 0;
    std::vector<double> s_exp(n), s_log(n), s_sub(n), s_axpy = y;
    with_backend(k::Backend::scalar, [&] {
      s_sum = k::sum(x);
      s_dot = k::dot(x, y);
      s_max = k::max(x);
      s_min = k::min(x);
      s_lse = k::logsumexp(x);
      s_xlogy = k::xlogy_sum(mask, pos);
      k::exp_to(s_exp, x);
      k::log_to(s_log, pos);
      k::sub_scale_to(s_sub, x, y, 1.7);
      k::axpy(0.3, x, s_axpy);
    });

    double v_sum = 0, v_dot = 0, v_max = 0, v_min = 0, v_lse = 0, v_xlogy = 0;
    std::vector<double> v_exp(n), v_log(n), v_sub(n), v_axpy = y;
    with_backend(k::Backend::avx2, [&] {
      v_sum = k::sum(x);
      v_dot = k::dot(x, y);
      v_max = k::max(x);
      v_min = k::min(x);
      v_lse = k::logsumexp(x);
      v_xlogy = k::xlogy_sum(mask, pos);
      k::exp_to(v_exp, x);
      k::log_to(v_log, pos);
      k::sub_scale_to(v_sub, x, y, 1.7);
      k::axpy(0.3, x, v_axpy);
    });

    CAPTURE(n);
    CHECK(same_bits(s_sum, v_sum));
    CHECK(same_bits(s_dot, v_dot));
    CHECK(same_bits(s_max, v_max));
    CHECK(same_bits(s_min, v_min));
    CHECK(same_bits(s_lse, v_lse));
    CHECK(same_bits(s_xlogy, v_xlogy));
    for (size_t i = 0; i < n; ++i) {
      CHECK(same_bits(s_exp[i], v_exp[i]));
      CHECK(same_bits(s_log[i], v_log[i]));
      CHECK(same_bits(s_sub[i], v_sub[i]));
      CHECK(same_bits(s_axpy[i], v_axpy[i]));
    }
  }
}

TEST_CASE("backends agree bitwise on special values" * doctest::skip(!k::avx2_available())) {
  std::vector<double> specials = special_values();
  // pad to a multiple of 4 plus a tail so both vector and tail paths run
  while (specials.size() % 4 != 3) specials.push_back(1.25);

  std::vector<double> s_exp(specials.size()), v_exp(specials.size());
  std::vector<double> s_log(specials.size()), v_log(specials.size());
  with_backend(k::Backend::scalar, [&] {
    k::exp_to(s_exp, specials);
    k::log_to(s_log, specials);
  });
  with_backend(k::Backend::avx2, [&] {
    k::exp_to(v_exp, specials);
    k::log_to(v_log, specials);
  });
  for (size_t i = 0; i < specials.size(); ++i) {
    CAPTURE(specials[i]);
    CHECK(same_bits(s_exp[i], v_exp[i]));
    CHECK(same_bits(s_log[i], v_log[i]));
  }
}

TEST_CASE("reductions match a long double reference") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const size_t n = 1 + rng() % 200;
    std::vector<double> x = random_vec(rng, n, -10.0, 10.0);
    std::vector<double> y = random_vec(rng, n, -10.0, 10.0);

    long double ref_sum = 0, ref_dot = 0;
    for (size_t i = 0; i < n; ++i) {
      ref_sum += x[i];
      ref_dot += static_cast<long double>(x[i]) * y[i];
    }
    CHECK(k::sum(x) == doctest::Approx(static_cast<double>(ref_sum)).epsilon(1e-13));
    CHECK(k::dot(x, y) == doctest::Approx(static_cast<double>(ref_dot)).epsilon(1e-13));

    long double ref_lse = 0;
    double m = *std::max_element(x.begin(), x.end());
    for (size_t i = 0; i < n; ++i) ref_lse += std::exp(static_cast<long double>(x[i] - m));
    const double want = m + static_cast<double>(std::log(ref_lse));
    CHECK(k::logsumexp(x) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("logsumexp handles extreme magnitudes and -inf entries") {
  std::vector<double> big = {1000.0, 999.0, -1000.0};
  CHECK(k::logsumexp(big) == doctest::Approx(1000.0 + std::log1p(std::exp(-1.0))).epsilon(1e-14));
  std::vector<double> withninf = {-kInf, 0.0, -kInf};
  CHECK(k::logsumexp(withninf) == doctest::Approx(0.0));
  std::vector<double> allninf = {-kInf, -kInf};
  CHECK(k::logsumexp(allninf) == -kInf);
  CHECK(k::logsumexp({}) == -kInf);
}

TEST_CASE("xlogy_sum treats zero coefficients as exact zero terms") {
  std::vector<double> a = {0.0, 2.0, 0.0, 1.0};
  std::vector<double> x = {0.0, 1.0, 0.0, std::exp(1.0)};
  CHECK(k::xlogy_sum(a, x) == doctest::Approx(1.0).epsilon(1e-14));
  // a zero coefficient suppresses a -inf log
  std::vector<double> a2 = {0.0};
  std::vector<double> x2 = {0.0};
  CHECK(k::xlogy_sum(a2, x2) == 0.0);
  // but a nonzero coefficient against zero still yields -inf
  std::vector<double> a3 = {1.0};
  CHECK(k::xlogy_sum(a3, x2) == -kInf);
}

TEST_CASE("backend selection") {
  CHECK(k::backend_name(k::Backend::scalar) == std::string("scalar"));
  if (!k::avx2_available()) {
    CHECK_THROWS_AS(k::set_backend(k::Backend::avx2), std::runtime_error);
  } else {
    with_backend(k::Backend::avx2, [] { CHECK(k::active_backend() == k::Backend::avx2); });
  }
}
