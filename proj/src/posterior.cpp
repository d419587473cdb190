#include "bayesot/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bayesot/kernels.hpp"

namespace bayesot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log sum_k exp(x_k), summing in ascending value order so the result does
// not depend on how the caller ordered the terms.
double logsumexp_canonical(std::vector<double>& x) {
  std::sort(x.begin(), x.end());
  return kernels::logsumexp(x);
}

}  // namespace

CostEnsemble::CostEnsemble(std::vector<CostMatrix> samples) : samples_(std::move(samples)) {
  if (samples_.empty())
    throw std::invalid_argument("CostEnsemble: ensemble must contain at least one sample");
  for (size_t k = 1; k < samples_.size(); ++k)
    if (!samples_[k].entries().same_shape(samples_[0].entries()))
      throw std::invalid_argument("CostEnsemble: sample " + std::to_string(k) +
                                  " has a different shape");

  const int n = samples_[0].rows();
  const int m = samples_[0].cols();
  sum_ = Matrix(n, m);
  std::vector<double> vals(samples_.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      for (size_t k = 0; k < samples_.size(); ++k) vals[k] = samples_[k].entries()(i, j);
      std::sort(vals.begin(), vals.end());
      sum_(i, j) = kernels::sum(vals);
    }
}

Matrix CostEnsemble::mean_matrix() const {
  Matrix mean = sum_;
  const double inv = 1.0 / size();
  for (double& v : mean.data()) v *= inv;
  return mean;
}

PosteriorSpec::PosteriorSpec(CostEnsemble ensemble, Prior prior, Condition condition,
                             TransportPlan base, double cost_scale)
    : ensemble_(std::move(ensemble)),
      prior_(std::move(prior)),
      condition_(condition),
      base_(std::move(base)),
      cost_scale_(cost_scale) {
  if (ensemble_.rows() != base_.rows() || ensemble_.cols() != base_.cols())
    throw std::invalid_argument("PosteriorSpec: ensemble and base plan shapes differ");
  if (!(cost_scale_ > 0.0) || !std::isfinite(cost_scale_))
    throw std::invalid_argument("PosteriorSpec: cost_scale must be finite and > 0");
  adjoint_sum_ = chart_adjoint(ensemble_.sum_matrix());
  adjoint_samples_.reserve(static_cast<size_t>(ensemble_.size()));
  for (const CostMatrix& c : ensemble_.samples())
    adjoint_samples_.push_back(chart_adjoint(c.entries()));
}

double log_likelihood_single(const CostMatrix& cost, const TransportPlan& plan,
                             double cost_scale) {
  return -cost_scale * transport_cost(cost, plan);
}

double neg_log_posterior(const PosteriorSpec& spec, const ChartCoordinates& theta) {
  const TransportPlan plan = plan_from_chart(theta, spec.base());
  const double lp = log_prior(spec.prior(), plan);
  if (lp == -kInf) return kInf;

  double ot_term;
  if (spec.condition() == Condition::forall) {
    ot_term = spec.cost_scale() * kernels::dot(spec.ensemble().sum_matrix().data(),
                                               plan.entries().data());
  } else {
    std::vector<double> a(static_cast<size_t>(spec.ensemble().size()));
    for (int k = 0; k < spec.ensemble().size(); ++k)
      a[static_cast<size_t>(k)] =
          -spec.cost_scale() *
          kernels::dot(spec.ensemble().sample(k).entries().data(), plan.entries().data());
    ot_term = -logsumexp_canonical(a);
  }
  return -lp + ot_term;
}

ChartCoordinates grad_neg_log_posterior(const PosteriorSpec& spec, const ChartCoordinates& theta) {
  ChartCoordinates prior_grad = grad_log_prior_theta(spec.prior(), theta, spec.base());

  Matrix grad = std::move(prior_grad.theta());
  for (double& v : grad.data()) v = -v;

  if (spec.condition() == Condition::forall) {
    kernels::axpy(spec.cost_scale(), spec.adjoint_sum().data(), grad.data());
  } else {
    const TransportPlan plan = plan_from_chart(theta, spec.base());
    const int count = spec.ensemble().size();
    std::vector<double> a(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k)
      a[static_cast<size_t>(k)] =
          -spec.cost_scale() *
          kernels::dot(spec.ensemble().sample(k).entries().data(), plan.entries().data());
    const double amax = kernels::max(a);
    std::vector<double> w(a.size());
    for (size_t k = 0; k < w.size(); ++k) w[k] = a[k] - amax;
    kernels::exp_to(w, w);
    const double wsum = kernels::sum(w);
    for (int k = 0; k < count; ++k)
      kernels::axpy(spec.cost_scale() * w[static_cast<size_t>(k)] / wsum,
                    spec.adjoint_samples()[static_cast<size_t>(k)].data(), grad.data());
  }
  return ChartCoordinates(std::move(grad));
}

std::pair<TransportPlan, SolverReport> map_estimate(const PosteriorSpec& spec, double tol,
                                                    long long max_iter) {
  if (spec.condition() == Condition::exists)
    throw std::invalid_argument(
        "map_estimate: unsupported for condition exists (non-convex smooth minimum); use the "
        "posterior mean or highest-density draw instead");

  Matrix scaled = spec.ensemble().sum_matrix();
  for (double& v : scaled.data()) v *= spec.cost_scale();
  const CostMatrix cost(std::move(scaled));
  const DiscreteMeasure& mu = spec.base().row_marginal();
  const DiscreteMeasure& nu = spec.base().col_marginal();
  const Prior& prior = spec.prior();

  switch (prior.kind()) {
    case Prior::Kind::uniform:
      return exact_ot(cost, mu, nu);
    case Prior::Kind::entropy:
      return sinkhorn(cost, mu, nu, prior.epsilon(), tol, max_iter);
    case Prior::Kind::gaussian: {
      if (prior.precision_dense())
        throw std::invalid_argument(
            "map_estimate: dense gaussian precision is not supported; use a diagonal precision");
      // -log Pr = 1/2 (v - mean)' diag(p) (v - mean): epsilon 1, Mahalanobis metric
      return regularized_ot(cost, mu, nu,
                            Regularizer::quadratic_mahalanobis(prior.mean(), prior.precision_diag()),
                            1.0, tol, max_iter);
    }
    case Prior::Kind::tsallis:
      return regularized_ot(cost, mu, nu, Regularizer::tsallis(prior.q()), prior.epsilon(), tol,
                            max_iter);
    case Prior::Kind::dirichlet:
      throw std::invalid_argument("map_estimate: unsupported for dirichlet priors");
  }
  throw std::logic_error("map_estimate: unknown prior kind");
}

}  // namespace bayesot
