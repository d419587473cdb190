#ifndef BAYESOT_POLYTOPE_HPP
#define BAYESOT_POLYTOPE_HPP

#include <vector>

#include "bayesot/matrix.hpp"

namespace bayesot {

/// Atom weights of a finite probability measure. Weights are nonnegative
/// and sum to 1; inputs whose sum is within 1e-6 of 1 are renormalized,
/// anything farther off is rejected.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::vector<double> weights);

  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[static_cast<size_t>(i)]; }
  std::span<const double> weights() const { return weights_; }

  /// True when the input sum deviated from 1 and construction rescaled it.
  bool was_renormalized() const { return renormalized_; }

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.weights_ == b.weights_;
  }

 private:
  std::vector<double> weights_;
  bool renormalized_ = false;
};

class ChartCoordinates;

/// Element of the transport polytope Pi(mu, nu): an n x m matrix whose row
/// sums match mu and column sums match nu within 1e-9. Entry positivity is
/// checked by the checked factory; the chart produces plans that may leave
/// the polytope, queried via is_feasible.
class TransportPlan {
 public:
  /// Validates marginals and entries >= -1e-12.
  static TransportPlan make(Matrix entries, DiscreteMeasure row_marginal,
                            DiscreteMeasure col_marginal);

  /// Validates marginals only; used by the chart, which preserves marginals
  /// but not positivity.
  static TransportPlan make_marginal_checked(Matrix entries, DiscreteMeasure row_marginal,
                                             DiscreteMeasure col_marginal);

  /// No validation at all. Solvers use this to hand back a non-converged
  /// iterate whose marginal violation is the reported residual.
  static TransportPlan make_unchecked(Matrix entries, DiscreteMeasure row_marginal,
                                      DiscreteMeasure col_marginal);

  const Matrix& entries() const { return entries_; }
  const DiscreteMeasure& row_marginal() const { return row_marginal_; }
  const DiscreteMeasure& col_marginal() const { return col_marginal_; }
  int rows() const { return entries_.rows(); }
  int cols() const { return entries_.cols(); }

 private:
  TransportPlan(Matrix entries, DiscreteMeasure row, DiscreteMeasure col)
      : entries_(std::move(entries)), row_marginal_(std::move(row)), col_marginal_(std::move(col)) {}

  Matrix entries_;
  DiscreteMeasure row_marginal_;
  DiscreteMeasure col_marginal_;
};

/// Unconstrained (n-1) x (m-1) coordinates on the affine hull of the
/// polytope. Empty (0-dimensional) when n == 1 or m == 1.
class ChartCoordinates {
 public:
  ChartCoordinates() = default;
  explicit ChartCoordinates(Matrix theta) : theta_(std::move(theta)) {}

  const Matrix& theta() const { return theta_; }
  Matrix& theta() { return theta_; }
  int rows() const { return theta_.rows(); }
  int cols() const { return theta_.cols(); }
  long long dim() const { return theta_.size(); }

  friend bool operator==(const ChartCoordinates& a, const ChartCoordinates& b) {
    return a.theta_ == b.theta_;
  }

 private:
  Matrix theta_;
};

/// Gamma0 with (Gamma0)_ij = mu_i * nu_j; the chart origin.
TransportPlan independent_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// phi(Theta): the n x m matrix with zero row and column sums whose
/// top-left block is Theta. Row/column tails carry the negated sums.
Matrix chart_embed(const ChartCoordinates& theta);

/// Adjoint of chart_embed: maps an n x m matrix G to the (n-1) x (m-1)
/// matrix with entries G_ij - G_i,last - G_last,j + G_last,last.
Matrix chart_adjoint(const Matrix& g);

/// Gamma(Theta) = base + phi(Theta). Marginals are preserved; positivity is
/// not enforced (use is_feasible).
TransportPlan plan_from_chart(const ChartCoordinates& theta, const TransportPlan& base);

/// Inverse of plan_from_chart: top-left block of (plan - base). Errors when
/// the two plans do not share marginals within 1e-9.
ChartCoordinates chart_from_plan(const TransportPlan& plan, const TransportPlan& base);

/// All entries >= -tol, marginals within tol, and entries of zero-weight
/// rows/columns within tol of 0.
bool is_feasible(const TransportPlan& plan, double tol);

}  // namespace bayesot

#endif
