#include "bayesot/ot_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "bayesot/kernels.hpp"

namespace bayesot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_or_ninf(double w) { return w > 0.0 ? kernels::detail::log_core(w) : -kInf; }

double max_marginal_violation(const Matrix& g, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu) {
  double r = 0.0;
  for (int i = 0; i < g.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < g.cols(); ++j) s += g(i, j);
    r = std::max(r, std::abs(s - mu[i]));
  }
  for (int j = 0; j < g.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < g.rows(); ++i) s += g(i, j);
    r = std::max(r, std::abs(s - nu[j]));
  }
  return r;
}

void check_problem_shapes(const CostMatrix& cost, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu, const char* what) {
  if (cost.rows() != mu.size() || cost.cols() != nu.size())
    throw std::invalid_argument(std::string(what) + ": cost shape does not match marginals");
}

}  // namespace

CostMatrix::CostMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1)
    throw std::invalid_argument("CostMatrix: needs at least one cell");
  for (double v : entries_.data())
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("CostMatrix: entries must be finite and nonnegative");
}

double transport_cost(const CostMatrix& cost, const TransportPlan& plan) {
  require_same_shape(cost.entries(), plan.entries(), "transport_cost");
  return kernels::dot(cost.entries().data(), plan.entries().data());
}

// ---------------------------------------------------------------------------
// Exact OT: transportation simplex with tree basis and MODI duals.
// ---------------------------------------------------------------------------

namespace {

struct SimplexState {
  int n, m;
  Matrix flow;
  std::vector<std::vector<int>> row_adj;  // basic column indices per row
  std::vector<std::vector<int>> col_adj;  // basic row indices per column

  explicit SimplexState(int n_, int m_) : n(n_), m(m_), flow(n_, m_), row_adj(n_), col_adj(m_) {}

  void add_basic(int i, int j) {
    row_adj[i].push_back(j);
    col_adj[j].push_back(i);
  }

  void remove_basic(int i, int j) {
    auto& r = row_adj[i];
    r.erase(std::find(r.begin(), r.end(), j));
    auto& c = col_adj[j];
    c.erase(std::find(c.begin(), c.end(), i));
  }
};

// Northwest-corner start: walks a monotone staircase, always advancing one
// index, so exactly n+m-1 cells enter the basis (some with zero flow).
void northwest_corner(SimplexState& s, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> a(mu.weights().begin(), mu.weights().end());
  std::vector<double> b(nu.weights().begin(), nu.weights().end());
  int i = 0, j = 0;
  while (true) {
    const double x = std::min(a[i], b[j]);
    s.flow(i, j) = x;
    s.add_basic(i, j);
    a[i] -= x;
    b[j] -= x;
    if (i == s.n - 1 && j == s.m - 1) break;
    if (i < s.n - 1 && a[i] <= 0.0) {
      ++i;
    } else if (j < s.m - 1) {
      ++j;
    } else {
      ++i;
    }
  }
}

// Duals from the tree: u_i + v_j = C_ij on basic cells, rooted at u_0 = 0.
void compute_duals(const SimplexState& s, const Matrix& c, std::vector<double>& u,
                   std::vector<double>& v) {
  std::fill(u.begin(), u.end(), std::numeric_limits<double>::quiet_NaN());
  std::fill(v.begin(), v.end(), std::numeric_limits<double>::quiet_NaN());
  u[0] = 0.0;
  std::deque<int> queue;  // rows 0..n-1, cols n..n+m-1
  queue.push_back(0);
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    if (node < s.n) {
      for (int j : s.row_adj[node])
        if (std::isnan(v[j])) {
          v[j] = c(node, j) - u[node];
          queue.push_back(s.n + j);
        }
    } else {
      const int j = node - s.n;
      for (int i : s.col_adj[j])
        if (std::isnan(u[i])) {
          u[i] = c(i, j) - v[j];
          queue.push_back(i);
        }
    }
  }
}

// Unique tree path from row node ei to column node (n + ej), as a node list.
std::vector<int> tree_path(const SimplexState& s, int ei, int ej) {
  const int total = s.n + s.m;
  std::vector<int> parent(total, -2);
  std::deque<int> queue;
  parent[ei] = -1;
  queue.push_back(ei);
  const int target = s.n + ej;
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    if (node == target) break;
    if (node < s.n) {
      for (int j : s.row_adj[node]) {
        if (parent[s.n + j] == -2) {
          parent[s.n + j] = node;
          queue.push_back(s.n + j);
        }
      }
    } else {
      for (int i : s.col_adj[node - s.n]) {
        if (parent[i] == -2) {
          parent[i] = node;
          queue.push_back(i);
        }
      }
    }
  }
  std::vector<int> path;
  for (int node = target; node != -1; node = parent[node]) path.push_back(node);
  std::reverse(path.begin(), path.end());  // ei ... target
  return path;
}

}  // namespace

std::pair<TransportPlan, SolverReport> exact_ot(const CostMatrix& cost, const DiscreteMeasure& mu,
                                                const DiscreteMeasure& nu, long long size_cap) {
  check_problem_shapes(cost, mu, nu, "exact_ot");
  const int n = mu.size();
  const int m = nu.size();
  if (static_cast<long long>(n) * m > size_cap)
    throw std::invalid_argument("exact_ot: problem size " + std::to_string(n) + "x" +
                                std::to_string(m) + " exceeds cap " + std::to_string(size_cap));
  const Matrix& c = cost.entries();

  SimplexState s(n, m);
  northwest_corner(s, mu, nu);

  double cmax = 0.0;
  for (double v : c.data()) cmax = std::max(cmax, v);
  const double opt_tol = 1e-11 * std::max(1.0, cmax);

  std::vector<double> u(n), v(m);
  std::vector<char> basic(static_cast<size_t>(n) * m, 0);
  for (int i = 0; i < n; ++i)
    for (int j : s.row_adj[i]) basic[static_cast<size_t>(i) * m + j] = 1;

  SolverReport report;
  const long long max_pivots = 100000;
  long long degenerate_run = 0;
  bool blands_rule = false;

  while (report.iterations < max_pivots) {
    compute_duals(s, c, u, v);

    int ei = -1, ej = -1;
    double best = -opt_tol;
    for (int i = 0; i < n && !(blands_rule && ei >= 0); ++i) {
      for (int j = 0; j < m; ++j) {
        if (basic[static_cast<size_t>(i) * m + j]) continue;
        const double rc = c(i, j) - u[i] - v[j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          if (blands_rule) break;
        }
      }
    }
    if (ei < 0) {
      report.converged = true;
      break;
    }

    ++report.iterations;
    const std::vector<int> path = tree_path(s, ei, ej);

    // Cycle cells along the path alternate -, +, -, ... after the entering
    // cell; the path has odd length so signs close up consistently.
    struct CycleCell {
      int i, j;
      bool minus;
    };
    std::vector<CycleCell> cells;
    for (size_t k = 0; k + 1 < path.size(); ++k) {
      const int a = path[k];
      const int b = path[k + 1];
      const int i = a < n ? a : b;
      const int j = a < n ? b - n : a - n;
      cells.push_back({i, j, k % 2 == 0});
    }

    double theta = kInf;
    int leave_i = -1, leave_j = -1;
    for (const auto& cell : cells) {
      if (!cell.minus) continue;
      const double f = s.flow(cell.i, cell.j);
      if (f < theta ||
          (f == theta && (cell.i < leave_i || (cell.i == leave_i && cell.j < leave_j)))) {
        theta = f;
        leave_i = cell.i;
        leave_j = cell.j;
      }
    }

    for (const auto& cell : cells)
      s.flow(cell.i, cell.j) += cell.minus ? -theta : theta;
    s.flow(ei, ej) = theta;
    s.flow(leave_i, leave_j) = 0.0;

    s.remove_basic(leave_i, leave_j);
    s.add_basic(ei, ej);
    basic[static_cast<size_t>(leave_i) * m + leave_j] = 0;
    basic[static_cast<size_t>(ei) * m + ej] = 1;

    if (theta <= 0.0) {
      if (++degenerate_run > static_cast<long long>(n) * m + n + m) blands_rule = true;
    } else {
      degenerate_run = 0;
      blands_rule = false;
    }
  }

  if (report.converged) {
    compute_duals(s, c, u, v);
    for (int i = 0; i < n && !report.degenerate; ++i)
      for (int j = 0; j < m; ++j)
        if (!basic[static_cast<size_t>(i) * m + j] && c(i, j) - u[i] - v[j] <= opt_tol) {
          report.degenerate = true;
          break;
        }
  }

  for (double& f : s.flow.data())
    if (f < 0.0) f = 0.0;  // round-off guard; pivots keep flows nonnegative

  report.objective = kernels::dot(c.data(), s.flow.data());
  report.residual = max_marginal_violation(s.flow, mu, nu);
  auto plan = TransportPlan::make_marginal_checked(std::move(s.flow), mu, nu);
  return {std::move(plan), report};
}

// ---------------------------------------------------------------------------
// Sinkhorn-Knopp in the log domain.
// ---------------------------------------------------------------------------

std::pair<TransportPlan, SolverReport> sinkhorn(const CostMatrix& cost, const DiscreteMeasure& mu,
                                                const DiscreteMeasure& nu, double epsilon,
                                                double tol, long long max_iter) {
  check_problem_shapes(cost, mu, nu, "sinkhorn");
  if (!(epsilon > 0.0)) throw std::invalid_argument("sinkhorn: epsilon must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("sinkhorn: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("sinkhorn: max_iter must be >= 1");

  const int n = mu.size();
  const int m = nu.size();
  const Matrix& c = cost.entries();
  const Matrix ct = c.transposed();
  const double inv_eps = 1.0 / epsilon;

  std::vector<double> log_mu(n), log_nu(m);
  for (int i = 0; i < n; ++i) log_mu[i] = log_or_ninf(mu[i]);
  for (int j = 0; j < m; ++j) log_nu[j] = log_or_ninf(nu[j]);

  std::vector<double> f(n, 0.0), g(m, 0.0);
  std::vector<double> zrow(m), zcol(n);
  Matrix plan(n, m);

  SolverReport report;
  for (long long it = 1; it <= max_iter; ++it) {
    report.iterations = it;
    for (int i = 0; i < n; ++i) {
      kernels::sub_scale_to(zrow, g, c.row(i), inv_eps);
      f[i] = epsilon * (log_mu[i] - kernels::logsumexp(zrow));
    }
    for (int j = 0; j < m; ++j) {
      kernels::sub_scale_to(zcol, f, ct.row(j), inv_eps);
      g[j] = epsilon * (log_nu[j] - kernels::logsumexp(zcol));
    }

    for (int i = 0; i < n; ++i) {
      auto row = plan.row(i);
      for (int j = 0; j < m; ++j) row[j] = (f[i] + g[j] - c(i, j)) * inv_eps;
      kernels::exp_to(row, row);
    }

    report.residual = max_marginal_violation(plan, mu, nu);
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
  }

  report.objective = kernels::dot(c.data(), plan.data());
  auto out = report.converged
                 ? TransportPlan::make_marginal_checked(std::move(plan), mu, nu)
                 : TransportPlan::make_unchecked(std::move(plan), mu, nu);
  return {std::move(out), report};
}

// ---------------------------------------------------------------------------
// Iterative Bregman projections for general regularizers.
// ---------------------------------------------------------------------------

Regularizer Regularizer::neg_entropy() { return Regularizer{Kind::neg_entropy, 0.5, {}, {}}; }
Regularizer Regularizer::quadratic() { return Regularizer{Kind::quadratic, 0.5, {}, {}}; }
Regularizer Regularizer::quadratic_mahalanobis(std::vector<double> mean,
                                               std::vector<double> weights) {
  return Regularizer{Kind::quadratic, 0.5, std::move(mean), std::move(weights)};
}
Regularizer Regularizer::tsallis(double q) { return Regularizer{Kind::tsallis, q, {}, {}}; }

namespace {

// Entropy regularizer, dual-coordinate form: track G = grad R(Gamma) and
// shift rows/columns so each projection's marginal constraint holds.
std::pair<TransportPlan, SolverReport> bregman_entropy(const CostMatrix& cost,
                                                       const DiscreteMeasure& mu,
                                                       const DiscreteMeasure& nu, double epsilon,
                                                       double tol, long long max_iter) {
  const int n = mu.size();
  const int m = nu.size();
  const Matrix& c = cost.entries();
  const double inv_eps = 1.0 / epsilon;

  Matrix g_mat(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) g_mat(i, j) = -c(i, j) * inv_eps;

  std::vector<char> row_dead(n, 0), col_dead(m, 0);
  for (int i = 0; i < n; ++i) row_dead[i] = mu[i] == 0.0;
  for (int j = 0; j < m; ++j) col_dead[j] = nu[j] == 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (row_dead[i] || col_dead[j]) g_mat(i, j) = -kInf;

  Matrix plan(n, m);
  SolverReport report;
  for (long long it = 1; it <= max_iter; ++it) {
    report.iterations = it;
    for (int i = 0; i < n; ++i) {
      if (row_dead[i]) continue;
      const double lam =
          kernels::detail::log_core(mu[i]) + 1.0 - kernels::logsumexp(g_mat.row(i));
      for (int j = 0; j < m; ++j)
        if (!col_dead[j]) g_mat(i, j) += lam;
    }
    Matrix gt = g_mat.transposed();
    for (int j = 0; j < m; ++j) {
      if (col_dead[j]) continue;
      const double lam =
          kernels::detail::log_core(nu[j]) + 1.0 - kernels::logsumexp(gt.row(j));
      for (int i = 0; i < n; ++i)
        if (!row_dead[i]) g_mat(i, j) += lam;
    }

    for (int i = 0; i < n; ++i) {
      auto row = plan.row(i);
      for (int j = 0; j < m; ++j) row[j] = g_mat(i, j) - 1.0;
      kernels::exp_to(row, row);
    }
    report.residual = max_marginal_violation(plan, mu, nu);
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
  }

  report.objective = kernels::dot(c.data(), plan.data());
  auto out = report.converged ? TransportPlan::make_marginal_checked(std::move(plan), mu, nu)
                              : TransportPlan::make_unchecked(std::move(plan), mu, nu);
  return {std::move(out), report};
}

// Tsallis R_q: grad R(x) = [q/(q-1)] x^(q-1), inverse x = ((q-1) g / q)^(1/(q-1)),
// valid for g < 0 when q in (0,1). The domain keeps iterates positive.
class TsallisLink {
 public:
  explicit TsallisLink(double q) : a_((q - 1.0) / q), pexp_(1.0 / (q - 1.0)) {}

  double value(double g) const { return std::pow(a_ * g, pexp_); }
  double derivative(double g) const { return pexp_ * a_ * std::pow(a_ * g, pexp_ - 1.0); }

 private:
  double a_;
  double pexp_;
};

// Solves sum_k value(g_k + lam) = target for lam < -max_k g_k by safeguarded
// Newton on a monotone increasing function.
double solve_shift(const TsallisLink& link, std::span<const double> g,
                   std::span<const char> dead, double target) {
  double gmax = -kInf;
  for (size_t k = 0; k < g.size(); ++k)
    if (!dead[k]) gmax = std::max(gmax, g[k]);

  auto eval = [&](double lam, double& deriv) {
    double s = 0.0;
    deriv = 0.0;
    for (size_t k = 0; k < g.size(); ++k) {
      if (dead[k]) continue;
      s += link.value(g[k] + lam);
      deriv += link.derivative(g[k] + lam);
    }
    return s;
  };

  double hi = -gmax;  // exclusive: sum -> +inf there
  double step = std::max(1.0, std::abs(gmax));
  double lo = hi - step;
  double dummy;
  while (eval(lo, dummy) > target) {
    step *= 2.0;
    lo = hi - step;
    if (!std::isfinite(lo)) throw std::runtime_error("regularized_ot: tsallis bracket failed");
  }

  double lam = lo;
  for (int iter = 0; iter < 200; ++iter) {
    double deriv;
    const double s = eval(lam, deriv);
    const double err = s - target;
    if (std::abs(err) <= 1e-13 * std::max(1.0, target)) break;
    if (err > 0.0)
      hi = lam;
    else
      lo = lam;
    double next = lam - err / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lam = next;
  }
  return lam;
}

std::pair<TransportPlan, SolverReport> bregman_tsallis(const CostMatrix& cost,
                                                       const DiscreteMeasure& mu,
                                                       const DiscreteMeasure& nu, double q,
                                                       double epsilon, double tol,
                                                       long long max_iter) {
  const int n = mu.size();
  const int m = nu.size();
  const Matrix& c = cost.entries();
  const TsallisLink link(q);

  Matrix g_mat(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) g_mat(i, j) = -c(i, j) / epsilon - 1e-12;  // keep strictly < 0

  std::vector<char> row_dead(n, 0), col_dead(m, 0);
  for (int i = 0; i < n; ++i) row_dead[i] = mu[i] == 0.0;
  for (int j = 0; j < m; ++j) col_dead[j] = nu[j] == 0.0;

  Matrix plan(n, m);
  SolverReport report;
  std::vector<double> buf(std::max(n, m));
  std::vector<char> bufdead(std::max(n, m));

  for (long long it = 1; it <= max_iter; ++it) {
    report.iterations = it;
    for (int i = 0; i < n; ++i) {
      if (row_dead[i]) continue;
      for (int j = 0; j < m; ++j) {
        buf[j] = g_mat(i, j);
        bufdead[j] = col_dead[j];
      }
      const double lam = solve_shift(link, {buf.data(), static_cast<size_t>(m)},
                                     {bufdead.data(), static_cast<size_t>(m)}, mu[i]);
      for (int j = 0; j < m; ++j)
        if (!col_dead[j]) g_mat(i, j) += lam;
    }
    for (int j = 0; j < m; ++j) {
      if (col_dead[j]) continue;
      for (int i = 0; i < n; ++i) {
        buf[i] = g_mat(i, j);
        bufdead[i] = row_dead[i];
      }
      const double lam = solve_shift(link, {buf.data(), static_cast<size_t>(n)},
                                     {bufdead.data(), static_cast<size_t>(n)}, nu[j]);
      for (int i = 0; i < n; ++i)
        if (!row_dead[i]) g_mat(i, j) += lam;
    }

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        plan(i, j) = (row_dead[i] || col_dead[j]) ? 0.0 : link.value(g_mat(i, j));
    report.residual = max_marginal_violation(plan, mu, nu);
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
  }

  report.objective = kernels::dot(c.data(), plan.data());
  auto out = report.converged ? TransportPlan::make_marginal_checked(std::move(plan), mu, nu)
                              : TransportPlan::make_unchecked(std::move(plan), mu, nu);
  return {std::move(out), report};
}

// Quadratic (optionally Mahalanobis) regularizer: Dykstra's algorithm on
// {row sums}, {col sums}, {Gamma >= 0} under the diagonal metric.
std::pair<TransportPlan, SolverReport> dykstra_quadratic(const CostMatrix& cost,
                                                         const DiscreteMeasure& mu,
                                                         const DiscreteMeasure& nu,
                                                         const Regularizer& reg, double epsilon,
                                                         double tol, long long max_iter) {
  const int n = mu.size();
  const int m = nu.size();
  const size_t nm = static_cast<size_t>(n) * m;
  const Matrix& c = cost.entries();

  std::vector<double> w(nm, 1.0);
  if (!reg.weights.empty()) {
    if (reg.weights.size() != nm)
      throw std::invalid_argument("regularized_ot: quadratic weights must have n*m entries");
    for (double v : reg.weights)
      if (!(v > 0.0)) throw std::invalid_argument("regularized_ot: quadratic weights must be > 0");
    w = reg.weights;
  }
  std::vector<double> mean(nm, 0.0);
  if (!reg.mean.empty()) {
    if (reg.mean.size() != nm)
      throw std::invalid_argument("regularized_ot: quadratic mean must have n*m entries");
    mean = reg.mean;
  }

  Matrix x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const size_t k = static_cast<size_t>(i) * m + j;
      x(i, j) = mean[k] - c(i, j) / (epsilon * w[k]);
    }

  Matrix p_row(n, m), p_col(n, m), p_pos(n, m);
  std::vector<double> inv_w_row(n, 0.0), inv_w_col(m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      inv_w_row[i] += 1.0 / w[static_cast<size_t>(i) * m + j];
      inv_w_col[j] += 1.0 / w[static_cast<size_t>(i) * m + j];
    }

  SolverReport report;
  for (long long it = 1; it <= max_iter; ++it) {
    report.iterations = it;

    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) {
        x(i, j) += p_row(i, j);
        s += x(i, j);
      }
      const double defect = (mu[i] - s) / inv_w_row[i];
      for (int j = 0; j < m; ++j) {
        const double y = x(i, j) + defect / w[static_cast<size_t>(i) * m + j];
        p_row(i, j) = x(i, j) - y;
        x(i, j) = y;
      }
    }

    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        x(i, j) += p_col(i, j);
        s += x(i, j);
      }
      const double defect = (nu[j] - s) / inv_w_col[j];
      for (int i = 0; i < n; ++i) {
        const double y = x(i, j) + defect / w[static_cast<size_t>(i) * m + j];
        p_col(i, j) = x(i, j) - y;
        x(i, j) = y;
      }
    }

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double z = x(i, j) + p_pos(i, j);
        const double y = z > 0.0 ? z : 0.0;
        p_pos(i, j) = z - y;
        x(i, j) = y;
      }
    // after clamping the iterate is nonnegative; convergence is judged on
    // the marginals
    report.residual = max_marginal_violation(x, mu, nu);
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
  }

  report.objective = kernels::dot(c.data(), x.data());
  auto out = report.converged ? TransportPlan::make_marginal_checked(std::move(x), mu, nu)
                              : TransportPlan::make_unchecked(std::move(x), mu, nu);
  return {std::move(out), report};
}

}  // namespace

std::pair<TransportPlan, SolverReport> regularized_ot(const CostMatrix& cost,
                                                      const DiscreteMeasure& mu,
                                                      const DiscreteMeasure& nu,
                                                      const Regularizer& reg, double epsilon,
                                                      double tol, long long max_iter) {
  check_problem_shapes(cost, mu, nu, "regularized_ot");
  if (!(epsilon > 0.0)) throw std::invalid_argument("regularized_ot: epsilon must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("regularized_ot: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("regularized_ot: max_iter must be >= 1");

  switch (reg.kind) {
    case Regularizer::Kind::neg_entropy:
      return bregman_entropy(cost, mu, nu, epsilon, tol, max_iter);
    case Regularizer::Kind::tsallis:
      if (!(reg.q > 0.0 && reg.q < 1.0))
        throw std::invalid_argument("regularized_ot: tsallis q must lie in (0, 1)");
      return bregman_tsallis(cost, mu, nu, reg.q, epsilon, tol, max_iter);
    case Regularizer::Kind::quadratic:
      return dykstra_quadratic(cost, mu, nu, reg, epsilon, tol, max_iter);
  }
  throw std::invalid_argument("regularized_ot: unsupported regularizer");
}

}  // namespace bayesot
