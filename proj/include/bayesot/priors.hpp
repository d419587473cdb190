#ifndef BAYESOT_PRIORS_HPP
#define BAYESOT_PRIORS_HPP

#include <optional>
#include <vector>

#include "bayesot/matrix.hpp"
#include "bayesot/polytope.hpp"

namespace bayesot {

/// Prior over transport plans, evaluated as a log-density up to an additive
/// constant. A prior is the product of an informative factor and an
/// optional barrier factor; the barrier (a small-epsilon entropy term or
/// the feasible-set indicator) is what makes the sampler reject plans with
/// negative entries. Kinds whose own domain already excludes negative
/// entries default to no extra barrier; the Gaussian, which is finite
/// everywhere, defaults to the entropy barrier.
class Prior {
 public:
  enum class Kind { uniform, entropy, dirichlet, gaussian, tsallis };
  enum class Barrier { none, entropy, indicator };

  static Prior uniform();
  static Prior entropy(double epsilon);
  static Prior dirichlet(Matrix alpha);
  /// Diagonal precision (one weight per plan entry, row-major).
  static Prior gaussian_diagonal(std::vector<double> mean, std::vector<double> precision_diag);
  /// Dense symmetric positive-definite precision over vec(Gamma).
  static Prior gaussian_dense(std::vector<double> mean, Matrix precision);
  static Prior tsallis(double epsilon, double q);

  Prior& with_barrier(Barrier b, double barrier_epsilon = 1e-3);

  Kind kind() const { return kind_; }
  Barrier barrier() const { return barrier_; }
  double epsilon() const { return epsilon_; }
  double barrier_epsilon() const { return barrier_epsilon_; }
  double q() const { return q_; }
  const Matrix& alpha() const { return alpha_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& precision_diag() const { return precision_diag_; }
  const std::optional<Matrix>& precision_dense() const { return precision_dense_; }

 private:
  Prior() = default;

  Kind kind_ = Kind::uniform;
  Barrier barrier_ = Barrier::none;
  double epsilon_ = 1.0;
  double barrier_epsilon_ = 1e-3;
  double q_ = 0.5;
  Matrix alpha_;
  std::vector<double> mean_;
  std::vector<double> precision_diag_;
  std::optional<Matrix> precision_dense_;
};

/// Log prior density of a plan up to an additive constant; -inf outside the
/// prior's domain (entropy/dirichlet/tsallis with entries outside the
/// positive orthant, uniform off the feasible set). Includes the barrier
/// factor when one is attached.
double log_prior(const Prior& prior, const TransportPlan& plan);

/// Gradient of log_prior(Gamma(theta)) with respect to theta: the chart
/// adjoint applied to the plan-space gradient. Errors at points where the
/// log density is -inf or its gradient undefined (boundary of a barrier
/// domain); the sampler treats those as rejections.
ChartCoordinates grad_log_prior_theta(const Prior& prior, const ChartCoordinates& theta,
                                      const TransportPlan& base);

}  // namespace bayesot

#endif
