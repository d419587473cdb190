#ifndef BAYESOT_TESTS_ORACLES_HPP
#define BAYESOT_TESTS_ORACLES_HPP

// Test-only oracles, independent of the solver paths they check: brute-force
// minimization over the chart-parameterized feasible set (grid plus exact
// vertex enumeration for 1- and 2-dimensional charts), central finite
// differences, and a Kolmogorov-Smirnov statistic.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bayesot/ot_solvers.hpp"
#include "bayesot/polytope.hpp"

namespace bayesot::oracles {

struct ChartProblem {
  TransportPlan base;
  std::vector<Matrix> axis_embeds;  // phi(e_a) per chart axis
};

inline ChartProblem chart_problem(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  ChartProblem p{independent_coupling(mu, nu), {}};
  const int n = mu.size();
  const int m = nu.size();
  for (int a = 0; a < (n - 1) * (m - 1); ++a) {
    Matrix unit(n - 1, m - 1);
    unit.data()[static_cast<size_t>(a)] = 1.0;
    p.axis_embeds.push_back(chart_embed(ChartCoordinates(unit)));
  }
  return p;
}

inline TransportPlan plan_at(const ChartProblem& p, const std::vector<double>& theta) {
  Matrix t(p.base.rows() - 1, p.base.cols() - 1);
  for (size_t a = 0; a < theta.size(); ++a) t.data()[a] = theta[a];
  return plan_from_chart(ChartCoordinates(std::move(t)), p.base);
}

// Per-axis feasible range of the chart around the base point.
inline std::pair<double, double> axis_range(const ChartProblem& p, size_t axis) {
  double tpos = std::numeric_limits<double>::infinity();
  double tneg = std::numeric_limits<double>::infinity();
  const Matrix& e = p.axis_embeds[axis];
  for (int i = 0; i < e.rows(); ++i)
    for (int j = 0; j < e.cols(); ++j) {
      if (e(i, j) < 0.0) tpos = std::min(tpos, p.base.entries()(i, j) / -e(i, j));
      if (e(i, j) > 0.0) tneg = std::min(tneg, p.base.entries()(i, j) / e(i, j));
    }
  return {-tneg, tpos};
}

// Vertices of the chart polytope for dimension 1 or 2: intersections of
// tight cell constraints, filtered for feasibility.
inline std::vector<std::vector<double>> chart_vertices(const ChartProblem& p) {
  const size_t dim = p.axis_embeds.size();
  const int n = p.base.rows();
  const int m = p.base.cols();
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("chart_vertices: only 1- and 2-dimensional charts");

  struct Constraint {
    std::vector<double> a;  // a . theta + b >= 0
    double b;
  };
  std::vector<Constraint> cons;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      Constraint c{std::vector<double>(dim), p.base.entries()(i, j)};
      for (size_t ax = 0; ax < dim; ++ax) c.a[ax] = p.axis_embeds[ax](i, j);
      cons.push_back(std::move(c));
    }

  std::vector<std::vector<double>> verts;
  auto feasible = [&](const std::vector<double>& t) {
    for (const auto& c : cons) {
      double v = c.b;
      for (size_t ax = 0; ax < dim; ++ax) v += c.a[ax] * t[ax];
      if (v < -1e-10) return false;
    }
    return true;
  };

  if (dim == 1) {
    for (const auto& c : cons) {
      if (c.a[0] == 0.0) continue;
      std::vector<double> t = {-c.b / c.a[0]};
      if (feasible(t)) verts.push_back(std::move(t));
    }
  } else {
    for (size_t i = 0; i < cons.size(); ++i)
      for (size_t j = i + 1; j < cons.size(); ++j) {
        const double det = cons[i].a[0] * cons[j].a[1] - cons[i].a[1] * cons[j].a[0];
        if (std::abs(det) < 1e-14) continue;
        const double t0 = (-cons[i].b * cons[j].a[1] + cons[j].b * cons[i].a[1]) / det;
        const double t1 = (-cons[j].b * cons[i].a[0] + cons[i].b * cons[j].a[0]) / det;
        std::vector<double> t = {t0, t1};
        if (feasible(t)) verts.push_back(std::move(t));
      }
  }
  return verts;
}

// Brute-force minimum of f over the chart polytope: a dense grid over the
// per-axis bounding box plus the exact vertices (linear objectives attain
// their minimum there).
inline double brute_force_min(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const std::function<double(const TransportPlan&)>& f,
                              int points_per_axis) {
  const ChartProblem p = chart_problem(mu, nu);
  const size_t dim = p.axis_embeds.size();
  if (dim < 1 || dim > 2)
    throw std::invalid_argument("brute_force_min: only 1- and 2-dimensional charts");

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& t) {
    const TransportPlan plan = plan_at(p, t);
    if (!is_feasible(plan, 1e-9)) return;
    best = std::min(best, f(plan));
  };

  std::vector<std::pair<double, double>> ranges;
  for (size_t ax = 0; ax < dim; ++ax) ranges.push_back(axis_range(p, ax));

  if (dim == 1) {
    for (int k = 0; k < points_per_axis; ++k) {
      const double frac = static_cast<double>(k) / (points_per_axis - 1);
      consider({ranges[0].first + frac * (ranges[0].second - ranges[0].first)});
    }
  } else {
    for (int k0 = 0; k0 < points_per_axis; ++k0)
      for (int k1 = 0; k1 < points_per_axis; ++k1) {
        const double f0 = static_cast<double>(k0) / (points_per_axis - 1);
        const double f1 = static_cast<double>(k1) / (points_per_axis - 1);
        consider({ranges[0].first + f0 * (ranges[0].second - ranges[0].first),
                  ranges[1].first + f1 * (ranges[1].second - ranges[1].first)});
      }
  }
  for (const auto& v : chart_vertices(p)) consider(v);
  return best;
}

inline double brute_force_ot_min(const CostMatrix& cost, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, int points_per_axis) {
  return brute_force_min(
      mu, nu, [&](const TransportPlan& plan) { return transport_cost(cost, plan); },
      points_per_axis);
}

// Central finite differences of f on chart coordinates.
inline Matrix fd_gradient(const std::function<double(const ChartCoordinates&)>& f,
                          const ChartCoordinates& theta, double h = 1e-6) {
  Matrix g(theta.rows(), theta.cols());
  for (int i = 0; i < theta.rows(); ++i)
    for (int j = 0; j < theta.cols(); ++j) {
      Matrix plus = theta.theta();
      Matrix minus = theta.theta();
      plus(i, j) += h;
      minus(i, j) -= h;
      g(i, j) = (f(ChartCoordinates(plus)) - f(ChartCoordinates(minus))) / (2.0 * h);
    }
  return g;
}

// max per-component deviation scaled by max(1, |analytic|).
inline double gradient_mismatch(const Matrix& analytic, const Matrix& fd) {
  double worst = 0.0;
  for (int i = 0; i < analytic.rows(); ++i)
    for (int j = 0; j < analytic.cols(); ++j) {
      const double denom = std::max(1.0, std::abs(analytic(i, j)));
      worst = std::max(worst, std::abs(analytic(i, j) - fd(i, j)) / denom);
    }
  return worst;
}

// Kolmogorov-Smirnov statistic of draws against a CDF.
inline double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double ks = 0.0;
  for (size_t k = 0; k < draws.size(); ++k) {
    const double f = cdf(draws[k]);
    ks = std::max(ks, std::abs(f - static_cast<double>(k + 1) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(k) / n));
  }
  return ks;
}

}  // namespace bayesot::oracles

#endif
