#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bayesot/polytope.hpp"

using namespace bayesot;

namespace {

DiscreteMeasure uniform_measure(int n) {
  return DiscreteMeasure(std::vector<double>(static_cast<size_t>(n), 1.0 / n));
}

TransportPlan uniform_2x2() { return independent_coupling(uniform_measure(2), uniform_measure(2)); }

}  // namespace

TEST_CASE("measure construction normalizes small deviations and rejects large ones") {
  DiscreteMeasure ok({0.5, 0.5});
  CHECK_FALSE(ok.was_renormalized());

  DiscreteMeasure close({0.5, 0.5 + 5e-7});
  CHECK(close.was_renormalized());
  CHECK(close[0] + close[1] == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(DiscreteMeasure({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({1.2, -0.2}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure(std::vector<double>{}), std::invalid_argument);
  CHECK_NOTHROW(DiscreteMeasure({1.0}));
  CHECK_NOTHROW(DiscreteMeasure({0.0, 1.0}));  // zero-weight atoms allowed
}

TEST_CASE("independent coupling is the outer product") {
  const TransportPlan g = uniform_2x2();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(g.entries()(i, j) == 0.25);

  const TransportPlan point = independent_coupling(DiscreteMeasure({1.0}), DiscreteMeasure({1.0}));
  CHECK(point.entries()(0, 0) == 1.0);

  const TransportPlan mixed =
      independent_coupling(DiscreteMeasure({0.3, 0.7}), DiscreteMeasure({0.5, 0.5}));
  CHECK(mixed.entries()(0, 0) == doctest::Approx(0.15));
  CHECK(mixed.entries()(0, 1) == doctest::Approx(0.15));
  CHECK(mixed.entries()(1, 0) == doctest::Approx(0.35));
  CHECK(mixed.entries()(1, 1) == doctest::Approx(0.35));
}

TEST_CASE("chart embedding block structure") {
  {
    const Matrix m = chart_embed(ChartCoordinates(Matrix(1, 1, {0.1})));
    CHECK(m(0, 0) == doctest::Approx(0.1));
    CHECK(m(0, 1) == doctest::Approx(-0.1));
    CHECK(m(1, 0) == doctest::Approx(-0.1));
    CHECK(m(1, 1) == doctest::Approx(0.1));
  }
  {
    const Matrix z = chart_embed(ChartCoordinates(Matrix(2, 3)));
    for (double v : z.data()) CHECK(v == 0.0);
  }
  {
    // n=3, m=2 example with theta = [[1],[2]]
    const Matrix m = chart_embed(ChartCoordinates(Matrix(2, 1, {1.0, 2.0})));
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == -1.0);
    CHECK(m(1, 0) == 2.0);
    CHECK(m(1, 1) == -2.0);
    CHECK(m(2, 0) == -3.0);
    CHECK(m(2, 1) == 3.0);
  }
}

TEST_CASE("chart embedding: zero row/col sums and linearity on random inputs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int m = 2 + static_cast<int>(rng() % 4);
    Matrix t1(n - 1, m - 1), t2(n - 1, m - 1);
    for (double& v : t1.data()) v = dist(rng);
    for (double& v : t2.data()) v = dist(rng);

    const Matrix e1 = chart_embed(ChartCoordinates(t1));
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += e1(i, j);
      CHECK(std::abs(s) <= 1e-12);
    }
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += e1(i, j);
      CHECK(std::abs(s) <= 1e-12);
    }

    const double a = dist(rng), b = dist(rng);
    Matrix combo(n - 1, m - 1);
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < m - 1; ++j) combo(i, j) = a * t1(i, j) + b * t2(i, j);
    const Matrix ec = chart_embed(ChartCoordinates(combo));
    const Matrix e2 = chart_embed(ChartCoordinates(t2));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        CHECK(std::abs(ec(i, j) - (a * e1(i, j) + b * e2(i, j))) <= 1e-12);
  }
}

TEST_CASE("plan from chart: worked 2x2 examples") {
  const TransportPlan base = uniform_2x2();

  const TransportPlan diag = plan_from_chart(ChartCoordinates(Matrix(1, 1, {0.25})), base);
  CHECK(diag.entries()(0, 0) == doctest::Approx(0.5));
  CHECK(diag.entries()(0, 1) == doctest::Approx(0.0));
  CHECK(diag.entries()(1, 0) == doctest::Approx(0.0));
  CHECK(diag.entries()(1, 1) == doctest::Approx(0.5));
  CHECK(is_feasible(diag, 1e-9));  // boundary point

  const TransportPlan same = plan_from_chart(ChartCoordinates(Matrix(1, 1, {0.0})), base);
  CHECK(same.entries()(0, 0) == 0.25);

  const TransportPlan outside = plan_from_chart(ChartCoordinates(Matrix(1, 1, {0.5})), base);
  CHECK(outside.entries()(0, 0) == doctest::Approx(0.75));
  CHECK(outside.entries()(0, 1) == doctest::Approx(-0.25));
  CHECK_FALSE(is_feasible(outside, 1e-9));

  CHECK_THROWS_AS(plan_from_chart(ChartCoordinates(Matrix(2, 2, 0.1)), base),
                  std::invalid_argument);
}

TEST_CASE("2x2 uniform feasibility interval is exactly [-1/4, 1/4]") {
  const TransportPlan base = uniform_2x2();
  for (double t : {-0.25, -0.1, 0.0, 0.2, 0.25})
    CHECK(is_feasible(plan_from_chart(ChartCoordinates(Matrix(1, 1, {t})), base), 1e-9));
  for (double t : {-0.2500001, 0.2500001, 0.5, -1.0})
    CHECK_FALSE(is_feasible(plan_from_chart(ChartCoordinates(Matrix(1, 1, {t})), base), 1e-9));
}

TEST_CASE("chart_from_plan inverts plan_from_chart") {
  const TransportPlan base = uniform_2x2();
  const ChartCoordinates zero = chart_from_plan(base, base);
  CHECK(zero.theta()(0, 0) == 0.0);

  const TransportPlan diag = plan_from_chart(ChartCoordinates(Matrix(1, 1, {0.25})), base);
  CHECK(chart_from_plan(diag, base).theta()(0, 0) == doctest::Approx(0.25).epsilon(1e-14));

  // property: roundtrip identity on random feasible 4x3 plans
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const DiscreteMeasure mu({0.1, 0.4, 0.3, 0.2});
  const DiscreteMeasure nu({0.3, 0.5, 0.2});
  const TransportPlan b43 = independent_coupling(mu, nu);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix t(3, 2);
    for (double& v : t.data()) v = 0.01 * dist(rng);
    const ChartCoordinates theta(t);
    const TransportPlan p = plan_from_chart(theta, b43);
    REQUIRE(is_feasible(p, 1e-9));
    const ChartCoordinates back = chart_from_plan(p, b43);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(back.theta()(i, j) - t(i, j)) <= 1e-12);
  }

  // marginal mismatch is rejected
  const TransportPlan other = independent_coupling(DiscreteMeasure({0.6, 0.4}), uniform_measure(2));
  CHECK_THROWS_AS(chart_from_plan(other, base), std::invalid_argument);
}

TEST_CASE("plan_from_chart preserves marginals to float accuracy") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  const DiscreteMeasure mu({0.25, 0.3, 0.45});
  const DiscreteMeasure nu({0.2, 0.2, 0.25, 0.35});
  const TransportPlan base = independent_coupling(mu, nu);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix t(2, 3);
    for (double& v : t.data()) v = dist(rng);
    const TransportPlan p = plan_from_chart(ChartCoordinates(t), base);
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int j = 0; j < 4; ++j) s += p.entries()(i, j);
      CHECK(std::abs(s - mu[i]) <= 1e-12);
    }
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += p.entries()(i, j);
      CHECK(std::abs(s - nu[j]) <= 1e-12);
    }
  }
}

TEST_CASE("is_feasible rejects negative entries and broken marginals") {
  const TransportPlan base = uniform_2x2();
  CHECK(is_feasible(base, 1e-9));

  Matrix bad = base.entries();
  bad(0, 0) = -0.01;
  bad(0, 1) = 0.51;
  const TransportPlan negative =
      TransportPlan::make_unchecked(bad, base.row_marginal(), base.col_marginal());
  CHECK_FALSE(is_feasible(negative, 1e-9));
  CHECK_THROWS_AS(is_feasible(base, -1.0), std::invalid_argument);
}

TEST_CASE("plan validation catches shape and sign errors") {
  const DiscreteMeasure mu({0.5, 0.5});
  const DiscreteMeasure nu({0.5, 0.5});
  CHECK_THROWS_AS(TransportPlan::make(Matrix(2, 2, {0.5, 0.0, 0.0, 0.4}), mu, nu),
                  std::invalid_argument);
  CHECK_THROWS_AS(TransportPlan::make(Matrix(2, 2, {0.6, -0.1, -0.1, 0.6}), mu, nu),
                  std::invalid_argument);
  CHECK_NOTHROW(TransportPlan::make(Matrix(2, 2, 0.25), mu, nu));
}

TEST_CASE("zero-weight atoms pin their rows to zero") {
  const DiscreteMeasure mu({0.0, 1.0});
  const DiscreteMeasure nu({0.5, 0.5});
  const TransportPlan g = independent_coupling(mu, nu);
  CHECK(g.entries()(0, 0) == 0.0);
  CHECK(g.entries()(0, 1) == 0.0);
  CHECK(is_feasible(g, 1e-9));

  // moving mass into the dead row violates the equality constraint
  Matrix bad = g.entries();
  bad(0, 0) = 1e-6;
  bad(0, 1) = -1e-6;
  CHECK_FALSE(is_feasible(TransportPlan::make_unchecked(bad, mu, nu), 1e-9));
}

TEST_CASE("degenerate 1xM chart has dimension zero") {
  const DiscreteMeasure mu({1.0});
  const DiscreteMeasure nu({0.25, 0.75});
  const TransportPlan g = independent_coupling(mu, nu);
  const ChartCoordinates theta = chart_from_plan(g, g);
  CHECK(theta.dim() == 0);
  const TransportPlan back = plan_from_chart(theta, g);
  CHECK(back.entries()(0, 0) == doctest::Approx(0.25));
  CHECK(back.entries()(0, 1) == doctest::Approx(0.75));
}
