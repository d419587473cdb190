#include "bayesot/priors.hpp"

#include <cmath>
#include <stdexcept>

#include "bayesot/kernels.hpp"

namespace bayesot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;

// Cholesky without pivoting; returns false when the matrix is not SPD.
bool cholesky_ok(const Matrix& a) {
  const int k = a.rows();
  Matrix l(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      if (i == j) {
        if (s <= 0.0) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace

Prior Prior::uniform() { return Prior(); }

Prior Prior::entropy(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("Prior::entropy: epsilon must be > 0");
  Prior p;
  p.kind_ = Kind::entropy;
  p.epsilon_ = epsilon;
  return p;
}

Prior Prior::dirichlet(Matrix alpha) {
  for (double a : alpha.data())
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("Prior::dirichlet: concentrations must be finite and > 0");
  Prior p;
  p.kind_ = Kind::dirichlet;
  p.alpha_ = std::move(alpha);
  return p;
}

Prior Prior::gaussian_diagonal(std::vector<double> mean, std::vector<double> precision_diag) {
  if (mean.size() != precision_diag.size())
    throw std::invalid_argument("Prior::gaussian_diagonal: mean/precision size mismatch");
  for (double v : precision_diag)
    if (!(v > 0.0)) throw std::invalid_argument("Prior::gaussian_diagonal: precision must be > 0");
  Prior p;
  p.kind_ = Kind::gaussian;
  p.mean_ = std::move(mean);
  p.precision_diag_ = std::move(precision_diag);
  p.barrier_ = Barrier::entropy;
  return p;
}

Prior Prior::gaussian_dense(std::vector<double> mean, Matrix precision) {
  if (precision.rows() != precision.cols())
    throw std::invalid_argument("Prior::gaussian_dense: precision must be square");
  if (static_cast<size_t>(precision.rows()) != mean.size())
    throw std::invalid_argument("Prior::gaussian_dense: mean/precision size mismatch");
  for (int i = 0; i < precision.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(precision(i, j) - precision(j, i)) >
          1e-12 * std::max(1.0, std::abs(precision(i, j))))
        throw std::invalid_argument("Prior::gaussian_dense: precision must be symmetric");
  if (!cholesky_ok(precision))
    throw std::invalid_argument("Prior::gaussian_dense: precision must be positive-definite");
  Prior p;
  p.kind_ = Kind::gaussian;
  p.mean_ = std::move(mean);
  p.precision_dense_ = std::move(precision);
  p.barrier_ = Barrier::entropy;
  return p;
}

Prior Prior::tsallis(double epsilon, double q) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("Prior::tsallis: epsilon must be > 0");
  if (!(q > 0.0) || q == 1.0 || !std::isfinite(q))
    throw std::invalid_argument("Prior::tsallis: q must be positive and != 1");
  Prior p;
  p.kind_ = Kind::tsallis;
  p.epsilon_ = epsilon;
  p.q_ = q;
  return p;
}

Prior& Prior::with_barrier(Barrier b, double barrier_epsilon) {
  if (b == Barrier::entropy && !(barrier_epsilon > 0.0))
    throw std::invalid_argument("Prior: barrier epsilon must be > 0");
  barrier_ = b;
  barrier_epsilon_ = barrier_epsilon;
  return *this;
}

namespace {

// eps * H(Gamma); -inf when an entry is negative. 0*log 0 := 0.
double entropy_term(double eps, const Matrix& g) {
  if (kernels::min(g.data()) < 0.0) return -kInf;
  return -eps * kernels::xlogy_sum(g.data(), g.data());
}

double informative_log_prior(const Prior& prior, const TransportPlan& plan) {
  const Matrix& g = plan.entries();
  switch (prior.kind()) {
    case Prior::Kind::uniform:
      return is_feasible(plan, kFeasTol) ? 0.0 : -kInf;
    case Prior::Kind::entropy:
      return entropy_term(prior.epsilon(), g);
    case Prior::Kind::dirichlet: {
      require_same_shape(prior.alpha(), g, "log_prior: dirichlet alpha");
      std::vector<double> am1(g.data().size());
      auto gd = g.data();
      auto ad = prior.alpha().data();
      for (size_t k = 0; k < am1.size(); ++k) {
        if (gd[k] <= 0.0 && ad[k] != 1.0) return -kInf;
        am1[k] = ad[k] - 1.0;
      }
      return kernels::xlogy_sum(am1, gd);
    }
    case Prior::Kind::gaussian: {
      auto gd = g.data();
      if (gd.size() != prior.mean().size())
        throw std::invalid_argument("log_prior: gaussian mean size does not match plan");
      std::vector<double> r(gd.size());
      for (size_t k = 0; k < r.size(); ++k) r[k] = gd[k] - prior.mean()[k];
      if (prior.precision_dense()) {
        const Matrix& p = *prior.precision_dense();
        double quad = 0.0;
        for (int i = 0; i < p.rows(); ++i) quad += r[static_cast<size_t>(i)] * kernels::dot(p.row(i), r);
        return -0.5 * quad;
      }
      double quad = 0.0;
      for (size_t k = 0; k < r.size(); ++k) quad += prior.precision_diag()[k] * r[k] * r[k];
      return -0.5 * quad;
    }
    case Prior::Kind::tsallis: {
      auto gd = g.data();
      if (kernels::min(gd) < 0.0) return -kInf;
      std::vector<double> t(gd.size());
      kernels::log_to(t, gd);  // log 0 = -inf; q*log -> -inf; exp -> 0
      for (double& v : t) v *= prior.q();
      kernels::exp_to(t, t);
      const double rq = (kernels::sum(t) - 1.0) / (prior.q() - 1.0);
      return -prior.epsilon() * rq;
    }
  }
  throw std::logic_error("log_prior: unknown prior kind");
}

double barrier_log_prior(const Prior& prior, const TransportPlan& plan) {
  switch (prior.barrier()) {
    case Prior::Barrier::none:
      return 0.0;
    case Prior::Barrier::entropy:
      return entropy_term(prior.barrier_epsilon(), plan.entries());
    case Prior::Barrier::indicator:
      return is_feasible(plan, kFeasTol) ? 0.0 : -kInf;
  }
  throw std::logic_error("log_prior: unknown barrier kind");
}

// Cells pinned to zero by a zero-weight marginal atom; they sit outside the
// barrier domains but carry no density, so gradients skip them.
bool forced_zero(const TransportPlan& plan, int i, int j) {
  return plan.row_marginal()[i] == 0.0 || plan.col_marginal()[j] == 0.0;
}

// Adds the plan-space gradient of eps*H to g_out; free entries must be > 0.
void add_entropy_gradient(double eps, const TransportPlan& plan, Matrix& g_out,
                          std::vector<double>& scratch) {
  const Matrix& g = plan.entries();
  scratch.resize(g.data().size());
  kernels::log_to(scratch, g.data());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      if (forced_zero(plan, i, j)) continue;
      if (!(g(i, j) > 0.0))
        throw std::domain_error("grad_log_prior: entropy term undefined at the boundary");
      g_out(i, j) += eps * (-scratch[static_cast<size_t>(i) * g.cols() + j] - 1.0);
    }
}

void add_informative_gradient(const Prior& prior, const TransportPlan& plan, Matrix& g_out,
                              std::vector<double>& scratch) {
  const Matrix& g = plan.entries();
  switch (prior.kind()) {
    case Prior::Kind::uniform:
      if (!is_feasible(plan, kFeasTol))
        throw std::domain_error("grad_log_prior: uniform prior undefined off the polytope");
      return;
    case Prior::Kind::entropy:
      add_entropy_gradient(prior.epsilon(), plan, g_out, scratch);
      return;
    case Prior::Kind::dirichlet: {
      require_same_shape(prior.alpha(), g, "grad_log_prior: dirichlet alpha");
      auto gd = g.data();
      auto ad = prior.alpha().data();
      auto out = g_out.data();
      for (size_t k = 0; k < out.size(); ++k) {
        if (ad[k] == 1.0) continue;
        if (!(gd[k] > 0.0))
          throw std::domain_error("grad_log_prior: dirichlet term undefined at the boundary");
        out[k] += (ad[k] - 1.0) / gd[k];
      }
      return;
    }
    case Prior::Kind::gaussian: {
      auto gd = g.data();
      if (gd.size() != prior.mean().size())
        throw std::invalid_argument("grad_log_prior: gaussian mean size does not match plan");
      std::vector<double>& r = scratch;
      r.resize(gd.size());
      for (size_t k = 0; k < r.size(); ++k) r[k] = gd[k] - prior.mean()[k];
      auto out = g_out.data();
      if (prior.precision_dense()) {
        const Matrix& p = *prior.precision_dense();
        for (int i = 0; i < p.rows(); ++i) out[static_cast<size_t>(i)] -= kernels::dot(p.row(i), r);
      } else {
        for (size_t k = 0; k < out.size(); ++k) out[k] -= prior.precision_diag()[k] * r[k];
      }
      return;
    }
    case Prior::Kind::tsallis: {
      auto gd = g.data();
      std::vector<double>& t = scratch;
      t.resize(gd.size());
      kernels::log_to(t, gd);
      for (double& v : t) v *= prior.q() - 1.0;
      kernels::exp_to(t, t);  // Gamma^(q-1)
      const double coef = -prior.epsilon() * prior.q() / (prior.q() - 1.0);
      for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) {
          if (forced_zero(plan, i, j)) continue;
          if (!(g(i, j) > 0.0))
            throw std::domain_error("grad_log_prior: tsallis term undefined at the boundary");
          g_out(i, j) += coef * t[static_cast<size_t>(i) * g.cols() + j];
        }
      return;
    }
  }
  throw std::logic_error("grad_log_prior: unknown prior kind");
}

}  // namespace

double log_prior(const Prior& prior, const TransportPlan& plan) {
  const double info = informative_log_prior(prior, plan);
  if (info == -kInf) return -kInf;
  const double bar = barrier_log_prior(prior, plan);
  return bar == -kInf ? -kInf : info + bar;
}

ChartCoordinates grad_log_prior_theta(const Prior& prior, const ChartCoordinates& theta,
                                      const TransportPlan& base) {
  const TransportPlan plan = plan_from_chart(theta, base);
  Matrix g(plan.rows(), plan.cols());
  std::vector<double> scratch;
  add_informative_gradient(prior, plan, g, scratch);
  switch (prior.barrier()) {
    case Prior::Barrier::none:
      break;
    case Prior::Barrier::entropy:
      add_entropy_gradient(prior.barrier_epsilon(), plan, g, scratch);
      break;
    case Prior::Barrier::indicator:
      if (!is_feasible(plan, kFeasTol))
        throw std::domain_error("grad_log_prior: indicator barrier undefined off the polytope");
      break;
  }
  return ChartCoordinates(chart_adjoint(g));
}

}  // namespace bayesot
