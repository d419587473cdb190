#include <doctest.h>

#include <cmath>
#include <vector>

#include "bayesot/rng.hpp"

using namespace bayesot;

// Known-answer vectors for Philox4x32-10 from the reference test suite.
TEST_CASE("philox4x32-10 known answers") {
  {
    const auto out = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("streams are independent of one another and reproducible") {
  RandomStream a(123, chain_stream(0));
  RandomStream b(123, chain_stream(1));
  RandomStream a2(123, chain_stream(0));

  std::vector<double> va, vb, va2;
  for (int i = 0; i < 100; ++i) {
    va.push_back(a.next_double());
    vb.push_back(b.next_double());
    va2.push_back(a2.next_double());
  }
  CHECK(va == va2);
  CHECK(va != vb);
}

TEST_CASE("uniform doubles live in [0,1) and look uniform") {
  RandomStream rng(99, chain_stream(3));
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have the right first two moments") {
  RandomStream rng(7, chain_stream(5));
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cost streams are disjoint across sides, atoms and samples") {
  RandomStream s0(1, cost_stream(0, 0, 0));
  RandomStream s1(1, cost_stream(1, 0, 0));
  RandomStream s2(1, cost_stream(0, 1, 0));
  RandomStream s3(1, cost_stream(0, 0, 1));
  const double d0 = s0.next_double();
  CHECK(d0 != s1.next_double());
  CHECK(d0 != s2.next_double());
  CHECK(d0 != s3.next_double());
  CHECK_THROWS(cost_stream(0, 1ull << 24, 0));
}
