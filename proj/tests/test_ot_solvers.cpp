#include <doctest.h>

#include <cmath>
#include <random>

#include "bayesot/ot_solvers.hpp"
#include "oracles.hpp"

using namespace bayesot;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> w(static_cast<size_t>(n));
  for (double& v : w) v = dist(rng);
  double s = 0.0;
  for (double v : w) s += v;
  for (double& v : w) v /= s;
  return DiscreteMeasure(std::move(w));
}

CostMatrix random_cost(std::mt19937_64& rng, int n, int m, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix c(n, m);
  for (double& v : c.data()) v = dist(rng);
  return CostMatrix(std::move(c));
}

const DiscreteMeasure kHalf({0.5, 0.5});

}  // namespace

TEST_CASE("cost matrix validation") {
  CHECK_THROWS_AS(CostMatrix(Matrix(2, 2, {1.0, -0.5, 0.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(CostMatrix(Matrix(1, 1, {std::numeric_limits<double>::infinity()})),
                  std::invalid_argument);
  CHECK_NOTHROW(CostMatrix(Matrix(2, 2, 0.0)));
}

TEST_CASE("transport cost worked examples") {
  const TransportPlan uniform = independent_coupling(kHalf, kHalf);
  CHECK(transport_cost(CostMatrix(Matrix(2, 2, 5.0)), uniform) == doctest::Approx(5.0));

  const TransportPlan zero = TransportPlan::make_unchecked(Matrix(2, 2, 0.0), kHalf, kHalf);
  CHECK(transport_cost(CostMatrix(Matrix(2, 2, {3.0, 7.0, 1.0, 9.0})), zero) == 0.0);

  const TransportPlan diag = TransportPlan::make(Matrix(2, 2, {0.5, 0.0, 0.0, 0.5}), kHalf, kHalf);
  CHECK(transport_cost(CostMatrix(Matrix(2, 2, {0.0, 10.0, 10.0, 0.0})), diag) == 0.0);

  CHECK_THROWS_AS(transport_cost(CostMatrix(Matrix(2, 3, 1.0)), diag), std::invalid_argument);
}

TEST_CASE("exact OT solves the crossed-cost 2x2 exactly") {
  const CostMatrix c(Matrix(2, 2, {0.0, 10.0, 10.0, 0.0}));
  auto [plan, report] = exact_ot(c, kHalf, kHalf);
  CHECK(report.converged);
  CHECK(report.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(plan.entries()(0, 0) == doctest::Approx(0.5));
  CHECK(plan.entries()(1, 1) == doctest::Approx(0.5));
  CHECK(is_feasible(plan, 1e-9));
}

TEST_CASE("exact OT degenerate cases") {
  {
    auto [plan, report] =
        exact_ot(CostMatrix(Matrix(1, 1, {3.5})), DiscreteMeasure({1.0}), DiscreteMeasure({1.0}));
    CHECK(report.objective == doctest::Approx(3.5));
    CHECK(plan.entries()(0, 0) == doctest::Approx(1.0));
  }
  {
    const DiscreteMeasure third({1.0 / 3, 1.0 / 3, 1.0 / 3});
    auto [plan, report] = exact_ot(CostMatrix(Matrix(3, 3, 2.0)), third, third);
    CHECK(report.converged);
    CHECK(report.objective == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.degenerate);  // every feasible plan is optimal
    CHECK(is_feasible(plan, 1e-9));
  }
  {
    // zero-weight atom: dead row carries no mass
    const DiscreteMeasure mu({0.0, 0.4, 0.6});
    const DiscreteMeasure nu({0.5, 0.5});
    std::mt19937_64 rng(3);
    auto [plan, report] = exact_ot(random_cost(rng, 3, 2), mu, nu);
    CHECK(report.converged);
    CHECK(plan.entries()(0, 0) == 0.0);
    CHECK(plan.entries()(0, 1) == 0.0);
    CHECK(is_feasible(plan, 1e-9));
  }
  {
    std::mt19937_64 rng(1);
    const DiscreteMeasure big = random_measure(rng, 100);
    CHECK_THROWS_AS(exact_ot(CostMatrix(Matrix(100, 100, 1.0)), big, big, 4096),
                    std::invalid_argument);
  }
}

TEST_CASE("exact OT matches the brute-force chart oracle on 2x2 and 2x3") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const DiscreteMeasure mu = random_measure(rng, 2);
    const DiscreteMeasure nu2 = random_measure(rng, 2);
    const CostMatrix c22 = random_cost(rng, 2, 2);
    auto [p22, r22] = exact_ot(c22, mu, nu2);
    const double oracle22 = oracles::brute_force_ot_min(c22, mu, nu2, 10000);
    CHECK(std::abs(r22.objective - oracle22) <= 1e-9);

    const DiscreteMeasure nu3 = random_measure(rng, 3);
    const CostMatrix c23 = random_cost(rng, 2, 3);
    auto [p23, r23] = exact_ot(c23, mu, nu3);
    const double oracle23 = oracles::brute_force_ot_min(c23, mu, nu3, 100);
    CHECK(std::abs(r23.objective - oracle23) <= 1e-9);
  }
}

TEST_CASE("exact OT objective scales linearly with the cost") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 5; ++rep) {
    const DiscreteMeasure mu = random_measure(rng, 4);
    const DiscreteMeasure nu = random_measure(rng, 5);
    const CostMatrix c = random_cost(rng, 4, 5);
    Matrix scaled = c.entries();
    const double a = 3.75;
    for (double& v : scaled.data()) v *= a;
    auto [p1, r1] = exact_ot(c, mu, nu);
    auto [p2, r2] = exact_ot(CostMatrix(std::move(scaled)), mu, nu);
    CHECK(std::abs(r2.objective - a * r1.objective) <= 1e-9 * std::max(1.0, a * r1.objective));
  }
}

TEST_CASE("exact OT objective lower-bounds random feasible plans") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const DiscreteMeasure mu = random_measure(rng, 3);
  const DiscreteMeasure nu = random_measure(rng, 4);
  const CostMatrix c = random_cost(rng, 3, 4);
  auto [opt, report] = exact_ot(c, mu, nu);
  const TransportPlan base = independent_coupling(mu, nu);
  for (int rep = 0; rep < 200; ++rep) {
    Matrix t(2, 3);
    for (double& v : t.data()) v = 0.01 * dist(rng);
    const TransportPlan p = plan_from_chart(ChartCoordinates(t), base);
    if (!is_feasible(p, 1e-9)) continue;
    CHECK(report.objective <= transport_cost(c, p) + 1e-9);
  }
}

TEST_CASE("sinkhorn symmetric and single-row cases") {
  {
    auto [plan, report] = sinkhorn(CostMatrix(Matrix(2, 2, 4.0)), kHalf, kHalf, 0.5);
    CHECK(report.converged);
    for (double v : plan.entries().data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-9));
  }
  {
    const DiscreteMeasure mu({1.0});
    const DiscreteMeasure nu({0.3, 0.2, 0.5});
    auto [plan, report] = sinkhorn(CostMatrix(Matrix(1, 3, {1.0, 2.0, 3.0})), mu, nu, 0.1);
    CHECK(report.converged);
    CHECK(plan.entries()(0, 0) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(plan.entries()(0, 1) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(plan.entries()(0, 2) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("sinkhorn approaches exact OT as epsilon shrinks") {
  const CostMatrix c(Matrix(2, 2, {0.0, 10.0, 10.0, 0.0}));
  auto [exact_plan, exact_report] = exact_ot(c, kHalf, kHalf);

  auto [plan, report] = sinkhorn(c, kHalf, kHalf, 1e-2);
  CHECK(report.converged);
  CHECK(std::abs(report.objective - exact_report.objective) <= 0.01);
  CHECK(std::abs(plan.entries()(0, 0) - 0.5) <= 1e-2);
  CHECK(std::abs(plan.entries()(0, 1) - 0.0) <= 1e-2);

  // monotone decrease toward the exact objective, bounded by eps * log(nm)
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.1, 0.01}) {
    auto [p, r] = sinkhorn(c, kHalf, kHalf, eps);
    REQUIRE(r.converged);
    CHECK(r.objective <= prev + 1e-12);
    CHECK(r.objective >= exact_report.objective - eps * std::log(4.0));
    CHECK(r.objective >= exact_report.objective - 1e-12);
    prev = r.objective;
  }
}

TEST_CASE("sinkhorn contract details") {
  std::mt19937_64 rng(31);
  const DiscreteMeasure mu = random_measure(rng, 5);
  const DiscreteMeasure nu = random_measure(rng, 5);
  const CostMatrix c = random_cost(rng, 5, 5, 1.0, 2.0);

  auto [plan, report] = sinkhorn(c, mu, nu, 1e-3, 1e-9, 200000);
  CHECK(report.converged);
  CHECK(report.residual <= 1e-9);
  CHECK(is_feasible(plan, 1e-9));

  // strict positivity at an epsilon where the entries are representable
  auto [pmod, rmod] = sinkhorn(c, mu, nu, 0.1);
  REQUIRE(rmod.converged);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(pmod.entries()(i, j) > 0.0);

  // non-convergence is reported, not thrown
  auto [p2, r2] = sinkhorn(c, mu, nu, 1e-3, 1e-12, 3);
  CHECK_FALSE(r2.converged);
  CHECK(r2.iterations == 3);

  CHECK_THROWS_AS(sinkhorn(c, mu, nu, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(c, mu, nu, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(c, mu, nu, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sinkhorn handles zero-weight atoms") {
  const DiscreteMeasure mu({0.0, 1.0});
  const DiscreteMeasure nu({0.5, 0.5});
  auto [plan, report] = sinkhorn(CostMatrix(Matrix(2, 2, {1.0, 2.0, 3.0, 4.0})), mu, nu, 0.5);
  CHECK(report.converged);
  CHECK(plan.entries()(0, 0) == 0.0);
  CHECK(plan.entries()(0, 1) == 0.0);
  CHECK(plan.entries()(1, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("bregman entropy route agrees with sinkhorn elementwise") {
  std::mt19937_64 rng(202);
  for (int rep = 0; rep < 5; ++rep) {
    const DiscreteMeasure mu = random_measure(rng, 5);
    const DiscreteMeasure nu = random_measure(rng, 5);
    const CostMatrix c = random_cost(rng, 5, 5);
    const double eps = 0.05;
    auto [ps, rs] = sinkhorn(c, mu, nu, eps, 1e-11, 200000);
    auto [pb, rb] = regularized_ot(c, mu, nu, Regularizer::neg_entropy(), eps, 1e-11, 200000);
    REQUIRE(rs.converged);
    REQUIRE(rb.converged);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        CHECK(std::abs(ps.entries()(i, j) - pb.entries()(i, j)) <= 1e-6);
  }
}

TEST_CASE("quadratic regularizer: symmetry and epsilon limit") {
  {
    auto [plan, report] =
        regularized_ot(CostMatrix(Matrix(2, 2, 3.0)), kHalf, kHalf, Regularizer::quadratic(), 1.0);
    CHECK(report.converged);
    for (double v : plan.entries().data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-8));
  }
  // crossed cost: the minimizer sits at theta = 5/eps, approaching uniform
  const CostMatrix c(Matrix(2, 2, {0.0, 10.0, 10.0, 0.0}));
  double prev_dist = std::numeric_limits<double>::infinity();
  for (double eps : {10.0, 100.0, 1000.0}) {
    auto [plan, report] = regularized_ot(c, kHalf, kHalf, Regularizer::quadratic(), eps);
    REQUIRE(report.converged);
    double dist = 0.0;
    for (double v : plan.entries().data()) dist = std::max(dist, std::abs(v - 0.25));
    CHECK(dist <= prev_dist + 1e-12);
    CHECK(dist == doctest::Approx(5.0 / eps).epsilon(1e-3));
    prev_dist = dist;
  }
}

TEST_CASE("quadratic regularizer solves the projection problem") {
  // for large eps the minimizer is the metric projection of the mean onto
  // the polytope; a feasible mean projects to itself
  const TransportPlan target = TransportPlan::make(Matrix(2, 2, {0.4, 0.1, 0.1, 0.4}), kHalf, kHalf);
  auto data = target.entries().data();
  auto [plan, report] = regularized_ot(
      CostMatrix(Matrix(2, 2, {1.0, 2.0, 3.0, 4.0})), kHalf, kHalf,
      Regularizer::quadratic_mahalanobis({data.begin(), data.end()}, {1.0, 1.0, 1.0, 1.0}), 1e7);
  REQUIRE(report.converged);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(plan.entries()(i, j) == doctest::Approx(target.entries()(i, j)).epsilon(1e-4));
}

TEST_CASE("tsallis regularizer converges to a feasible interior plan") {
  std::mt19937_64 rng(404);
  const DiscreteMeasure mu = random_measure(rng, 4);
  const DiscreteMeasure nu = random_measure(rng, 3);
  const CostMatrix c = random_cost(rng, 4, 3);
  auto [plan, report] = regularized_ot(c, mu, nu, Regularizer::tsallis(0.5), 0.5);
  CHECK(report.converged);
  CHECK(report.residual <= 1e-9);
  CHECK(is_feasible(plan, 1e-9));
  for (double v : plan.entries().data()) CHECK(v > 0.0);

  // symmetric case: uniform marginals and flat cost give the uniform plan
  auto [psym, rsym] =
      regularized_ot(CostMatrix(Matrix(2, 2, 1.0)), kHalf, kHalf, Regularizer::tsallis(0.5), 1.0);
  REQUIRE(rsym.converged);
  for (double v : psym.entries().data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-8));

  CHECK_THROWS_AS(regularized_ot(c, mu, nu, Regularizer::tsallis(1.5), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(regularized_ot(c, mu, nu, Regularizer::tsallis(0.5), -1.0), std::invalid_argument);
}

TEST_CASE("regularized plans respect the solver tolerance contract") {
  std::mt19937_64 rng(73);
  const DiscreteMeasure mu = random_measure(rng, 3);
  const DiscreteMeasure nu = random_measure(rng, 3);
  const CostMatrix c = random_cost(rng, 3, 3);
  for (auto reg : {Regularizer::neg_entropy(), Regularizer::quadratic(), Regularizer::tsallis(0.5)}) {
    auto [plan, report] = regularized_ot(c, mu, nu, reg, 0.3, 1e-8);
    REQUIRE(report.converged);
    CHECK(is_feasible(plan, 1e-8));
  }
}
