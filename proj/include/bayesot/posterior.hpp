#ifndef BAYESOT_POSTERIOR_HPP
#define BAYESOT_POSTERIOR_HPP

#include <vector>

#include "bayesot/ot_solvers.hpp"
#include "bayesot/polytope.hpp"
#include "bayesot/priors.hpp"

namespace bayesot {

/// Observed samples of a stochastic cost. The entrywise sum over samples is
/// precomputed in a canonical (value-sorted) order, so the density is
/// bit-invariant under permutations of the ensemble.
class CostEnsemble {
 public:
  explicit CostEnsemble(std::vector<CostMatrix> samples);

  int size() const { return static_cast<int>(samples_.size()); }
  int rows() const { return samples_.front().rows(); }
  int cols() const { return samples_.front().cols(); }
  const CostMatrix& sample(int k) const { return samples_[static_cast<size_t>(k)]; }
  const std::vector<CostMatrix>& samples() const { return samples_; }

  /// Entrywise sum over samples (canonical summation order).
  const Matrix& sum_matrix() const { return sum_; }

  /// sum / N, the average-cost baseline.
  Matrix mean_matrix() const;

 private:
  std::vector<CostMatrix> samples_;
  Matrix sum_;
};

enum class Condition { forall, exists };

/// Target density specification: prior, ensemble, conditioning choice,
/// chart base point, and likelihood temperature.
class PosteriorSpec {
 public:
  PosteriorSpec(CostEnsemble ensemble, Prior prior, Condition condition, TransportPlan base,
                double cost_scale = 1.0);

  const CostEnsemble& ensemble() const { return ensemble_; }
  const Prior& prior() const { return prior_; }
  Condition condition() const { return condition_; }
  const TransportPlan& base() const { return base_; }
  double cost_scale() const { return cost_scale_; }

  int rows() const { return base_.rows(); }
  int cols() const { return base_.cols(); }
  long long chart_dim() const {
    return static_cast<long long>(base_.rows() - 1) * (base_.cols() - 1);
  }

  /// chart_adjoint of the ensemble sum (gradient of the forall OT term).
  const Matrix& adjoint_sum() const { return adjoint_sum_; }
  /// chart_adjoint of each sample (gradients of the exists OT term).
  const std::vector<Matrix>& adjoint_samples() const { return adjoint_samples_; }

 private:
  CostEnsemble ensemble_;
  Prior prior_;
  Condition condition_;
  TransportPlan base_;
  double cost_scale_;
  Matrix adjoint_sum_;
  std::vector<Matrix> adjoint_samples_;
};

/// log Pr(O_k = 1 | ...) = -cost_scale * <C, Gamma>.
double log_likelihood_single(const CostMatrix& cost, const TransportPlan& plan, double cost_scale);

/// Negative log posterior at theta, up to an additive constant. +inf when
/// the prior excludes Gamma(theta). The exists case uses a stabilized
/// log-sum-exp over the ensemble in canonical value order.
double neg_log_posterior(const PosteriorSpec& spec, const ChartCoordinates& theta);

/// Gradient of neg_log_posterior in chart coordinates. Errors where the
/// prior's gradient is undefined (rejected points).
ChartCoordinates grad_neg_log_posterior(const PosteriorSpec& spec, const ChartCoordinates& theta);

/// MAP estimate for condition forall, by reduction to (regularized) OT on
/// the summed cost: uniform prior -> exact OT, entropy -> Sinkhorn,
/// gaussian (diagonal precision) -> quadratic Bregman, tsallis -> Tsallis
/// Bregman. The barrier factor is a sampler device and is not part of the
/// reduction. Unsupported: condition exists, dirichlet priors, dense
/// gaussian precision.
std::pair<TransportPlan, SolverReport> map_estimate(const PosteriorSpec& spec, double tol = 1e-9,
                                                    long long max_iter = 100000);

}  // namespace bayesot

#endif
