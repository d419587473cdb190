#include "bayesot/polytope.hpp"

#include <cmath>
#include <stdexcept>

namespace bayesot {

namespace {

constexpr double kMarginalTol = 1e-9;
constexpr double kEntryTol = 1e-12;
constexpr double kRenormTol = 1e-6;

void check_marginals(const Matrix& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     double tol, const char* what) {
  if (g.rows() != mu.size() || g.cols() != nu.size())
    throw std::invalid_argument(std::string(what) + ": entries shape does not match marginals");
  for (int i = 0; i < g.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < g.cols(); ++j) s += g(i, j);
    if (std::abs(s - mu[i]) > tol)
      throw std::invalid_argument(std::string(what) + ": row " + std::to_string(i) +
                                  " sum violates marginal by " + std::to_string(std::abs(s - mu[i])));
  }
  for (int j = 0; j < g.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < g.rows(); ++i) s += g(i, j);
    if (std::abs(s - nu[j]) > tol)
      throw std::invalid_argument(std::string(what) + ": column " + std::to_string(j) +
                                  " sum violates marginal by " + std::to_string(std::abs(s - nu[j])));
  }
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("DiscreteMeasure: needs at least one atom");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("DiscreteMeasure: weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kRenormTol)
    throw std::invalid_argument("DiscreteMeasure: weights sum to " + std::to_string(total) +
                                ", outside the 1e-6 renormalization band");
  if (total != 1.0) {
    for (double& w : weights_) w /= total;
    renormalized_ = true;
  }
}

TransportPlan TransportPlan::make(Matrix entries, DiscreteMeasure row, DiscreteMeasure col) {
  check_marginals(entries, row, col, kMarginalTol, "TransportPlan");
  for (double v : entries.data())
    if (v < -kEntryTol)
      throw std::invalid_argument("TransportPlan: entry " + std::to_string(v) +
                                  " below -1e-12; not a coupling");
  return TransportPlan(std::move(entries), std::move(row), std::move(col));
}

TransportPlan TransportPlan::make_marginal_checked(Matrix entries, DiscreteMeasure row,
                                                   DiscreteMeasure col) {
  check_marginals(entries, row, col, kMarginalTol, "TransportPlan");
  return TransportPlan(std::move(entries), std::move(row), std::move(col));
}

TransportPlan TransportPlan::make_unchecked(Matrix entries, DiscreteMeasure row,
                                            DiscreteMeasure col) {
  if (entries.rows() != row.size() || entries.cols() != col.size())
    throw std::invalid_argument("TransportPlan: entries shape does not match marginals");
  return TransportPlan(std::move(entries), std::move(row), std::move(col));
}

TransportPlan independent_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  Matrix g(mu.size(), nu.size());
  for (int i = 0; i < mu.size(); ++i)
    for (int j = 0; j < nu.size(); ++j) g(i, j) = mu[i] * nu[j];
  return TransportPlan::make_marginal_checked(std::move(g), mu, nu);
}

Matrix chart_embed(const ChartCoordinates& theta) {
  const Matrix& t = theta.theta();
  const int n = t.rows() + 1;
  const int m = t.cols() + 1;
  Matrix out(n, m);
  double total = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m - 1; ++j) {
      out(i, j) = t(i, j);
      row_sum += t(i, j);
    }
    out(i, m - 1) = -row_sum;
    total += row_sum;
  }
  for (int j = 0; j < m - 1; ++j) {
    double col_sum = 0.0;
    for (int i = 0; i < n - 1; ++i) col_sum += t(i, j);
    out(n - 1, j) = -col_sum;
  }
  out(n - 1, m - 1) = total;
  return out;
}

Matrix chart_adjoint(const Matrix& g) {
  if (g.rows() < 1 || g.cols() < 1) throw std::invalid_argument("chart_adjoint: empty matrix");
  const int n = g.rows();
  const int m = g.cols();
  Matrix out(n - 1, m - 1);
  const double corner = g(n - 1, m - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < m - 1; ++j) out(i, j) = g(i, j) - g(i, m - 1) - g(n - 1, j) + corner;
  return out;
}

TransportPlan plan_from_chart(const ChartCoordinates& theta, const TransportPlan& base) {
  if (theta.rows() != base.rows() - 1 || theta.cols() != base.cols() - 1)
    throw std::invalid_argument("plan_from_chart: theta must be (n-1)x(m-1) for an n x m base");
  Matrix entries = base.entries();
  if (theta.dim() > 0) {
    const Matrix shift = chart_embed(theta);
    for (int i = 0; i < entries.rows(); ++i)
      for (int j = 0; j < entries.cols(); ++j) entries(i, j) += shift(i, j);
  }
  return TransportPlan::make_marginal_checked(std::move(entries), base.row_marginal(),
                                              base.col_marginal());
}

ChartCoordinates chart_from_plan(const TransportPlan& plan, const TransportPlan& base) {
  if (plan.rows() != base.rows() || plan.cols() != base.cols())
    throw std::invalid_argument("chart_from_plan: plan and base shapes differ");
  for (int i = 0; i < plan.rows(); ++i)
    if (std::abs(plan.row_marginal()[i] - base.row_marginal()[i]) > kMarginalTol)
      throw std::invalid_argument("chart_from_plan: row marginals differ beyond 1e-9");
  for (int j = 0; j < plan.cols(); ++j)
    if (std::abs(plan.col_marginal()[j] - base.col_marginal()[j]) > kMarginalTol)
      throw std::invalid_argument("chart_from_plan: column marginals differ beyond 1e-9");
  Matrix t(plan.rows() - 1, plan.cols() - 1);
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) t(i, j) = plan.entries()(i, j) - base.entries()(i, j);
  return ChartCoordinates(std::move(t));
}

bool is_feasible(const TransportPlan& plan, double tol) {
  if (tol < 0.0) throw std::invalid_argument("is_feasible: tol must be >= 0");
  const Matrix& g = plan.entries();
  for (double v : g.data())
    if (!(v >= -tol)) return false;
  for (int i = 0; i < g.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < g.cols(); ++j) s += g(i, j);
    if (std::abs(s - plan.row_marginal()[i]) > tol) return false;
  }
  for (int j = 0; j < g.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < g.rows(); ++i) s += g(i, j);
    if (std::abs(s - plan.col_marginal()[j]) > tol) return false;
  }
  // zero-weight atoms pin their whole row/column to 0
  for (int i = 0; i < g.rows(); ++i)
    if (plan.row_marginal()[i] == 0.0)
      for (int j = 0; j < g.cols(); ++j)
        if (std::abs(g(i, j)) > tol) return false;
  for (int j = 0; j < g.cols(); ++j)
    if (plan.col_marginal()[j] == 0.0)
      for (int i = 0; i < g.rows(); ++i)
        if (std::abs(g(i, j)) > tol) return false;
  return true;
}

}  // namespace bayesot
