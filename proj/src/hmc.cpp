#include "bayesot/hmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bayesot/kernels.hpp"

namespace bayesot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;

double portable_exp(double x) { return kernels::detail::exp_core(x); }
double portable_log(double x) { return kernels::detail::log_core(x); }

struct AxisGeometry {
  std::vector<double> jitter_scale;  // 0.1 x distance to the boundary, 0 on frozen axes
  std::vector<char> frozen;          // axes whose chart stencil touches a forced-zero cell
};

AxisGeometry axis_geometry(const PosteriorSpec& spec) {
  const TransportPlan& base = spec.base();
  const int n = base.rows();
  const int m = base.cols();
  const auto& mu = base.row_marginal();
  const auto& nu = base.col_marginal();
  auto forced = [&](int i, int j) { return mu[i] == 0.0 || nu[j] == 0.0; };

  AxisGeometry geo;
  geo.jitter_scale.assign(static_cast<size_t>(spec.chart_dim()), 0.0);
  geo.frozen.assign(static_cast<size_t>(spec.chart_dim()), 0);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < m - 1; ++j) {
      const size_t a = static_cast<size_t>(i) * (m - 1) + j;
      if (forced(i, j) || forced(i, m - 1) || forced(n - 1, j) || forced(n - 1, m - 1)) {
        geo.frozen[a] = 1;
        continue;
      }
      const double tpos = std::min(base.entries()(i, m - 1), base.entries()(n - 1, j));
      const double tneg = std::min(base.entries()(i, j), base.entries()(n - 1, m - 1));
      geo.jitter_scale[a] = 0.1 * std::min(tpos, tneg);
    }
  return geo;
}

// Nesterov dual averaging toward the target acceptance statistic.
struct DualAveraging {
  double mu = 0.0;
  double log_eps = 0.0;
  double log_eps_bar = 0.0;
  double hbar = 0.0;
  long t = 0;
  double target = 0.8;

  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  void reset(double eps0, double target_accept) {
    mu = portable_log(10.0 * eps0);
    log_eps = portable_log(eps0);
    log_eps_bar = 0.0;
    hbar = 0.0;
    t = 0;
    target = target_accept;
  }

  void update(double accept_stat) {
    ++t;
    const double td = static_cast<double>(t);
    hbar = (1.0 - 1.0 / (td + kT0)) * hbar + (target - accept_stat) / (td + kT0);
    log_eps = mu - std::sqrt(td) / kGamma * hbar;
    const double w = portable_exp(-kKappa * portable_log(td));
    log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
  }

  double current() const { return portable_exp(log_eps); }
  double averaged() const { return portable_exp(log_eps_bar); }
};

bool grad_at(const PosteriorSpec& spec, const ChartCoordinates& theta, Matrix& out) {
  try {
    out = grad_neg_log_posterior(spec, theta).theta();
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

bool point_ok(const PosteriorSpec& spec, const ChartCoordinates& theta) {
  if (neg_log_posterior(spec, theta) == kInf) return false;
  return is_feasible(plan_from_chart(theta, spec.base()), kFeasTol);
}

}  // namespace

void HmcConfig::validate(long long chart_dim) const {
  if (!(step_size > 0.0)) throw std::invalid_argument("HmcConfig: step_size must be > 0");
  if (n_leapfrog < 1) throw std::invalid_argument("HmcConfig: n_leapfrog must be >= 1");
  if (n_warmup < 0) throw std::invalid_argument("HmcConfig: n_warmup must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("HmcConfig: n_samples must be >= 1");
  if (n_chains < 1) throw std::invalid_argument("HmcConfig: n_chains must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw std::invalid_argument("HmcConfig: target_accept must lie in (0, 1)");
  if (jitter_attempts < 1) throw std::invalid_argument("HmcConfig: jitter_attempts must be >= 1");
  if (!mass.empty()) {
    if (static_cast<long long>(mass.size()) != chart_dim)
      throw std::invalid_argument("HmcConfig: mass must have one entry per chart dimension");
    for (double v : mass)
      if (!(v > 0.0)) throw std::invalid_argument("HmcConfig: mass entries must be > 0");
  }
}

double hamiltonian(const PosteriorSpec& spec, const ChartCoordinates& theta,
                   const Matrix& momentum, const std::vector<double>& mass) {
  const double q = neg_log_posterior(spec, theta);
  if (q == kInf) return kInf;
  auto p = momentum.data();
  double kinetic = 0.0;
  for (size_t d = 0; d < p.size(); ++d) {
    const double m = mass.empty() ? 1.0 : mass[d];
    kinetic += 0.5 * p[d] * p[d] / m;
  }
  if (!std::isfinite(kinetic)) return kInf;
  return q + kinetic;
}

LeapfrogResult leapfrog(const PosteriorSpec& spec, const ChartCoordinates& theta,
                        const Matrix& momentum, double step_size, int n_steps,
                        const std::vector<double>& mass) {
  LeapfrogResult res{theta, momentum, false};
  if (n_steps <= 0) return res;

  Matrix q = theta.theta();
  Matrix p = momentum;
  Matrix grad(q.rows(), q.cols());

  auto half = step_size * 0.5;
  ChartCoordinates qc(q);
  if (!point_ok(spec, qc) || !grad_at(spec, qc, grad)) {
    res.divergent = true;
    return res;
  }

  auto pd = p.data();
  auto gd = grad.data();
  for (size_t d = 0; d < pd.size(); ++d) pd[d] -= half * gd[d];

  for (int step = 0; step < n_steps; ++step) {
    auto qd = q.data();
    for (size_t d = 0; d < qd.size(); ++d) {
      const double m = mass.empty() ? 1.0 : mass[d];
      qd[d] += step_size * pd[d] / m;
    }
    qc = ChartCoordinates(q);
    if (!point_ok(spec, qc) || !grad_at(spec, qc, grad)) {
      res.divergent = true;
      return res;
    }
    gd = grad.data();
    const double kick = step == n_steps - 1 ? half : step_size;
    for (size_t d = 0; d < pd.size(); ++d) pd[d] -= kick * gd[d];
  }

  res.theta = ChartCoordinates(std::move(q));
  res.momentum = std::move(p);
  return res;
}

double accept_probability(double delta_h) {
  if (delta_h <= 0.0) return 1.0;
  return portable_exp(-delta_h);
}

namespace {

TransitionResult transition_impl(const PosteriorSpec& spec, const ChartCoordinates& theta,
                                 const HmcConfig& config, const AxisGeometry& geo,
                                 RandomStream& rng) {
  const int rows = theta.rows();
  const int cols = theta.cols();

  Matrix p(rows, cols);
  auto pd = p.data();
  for (size_t d = 0; d < pd.size(); ++d) {
    const double m = config.mass.empty() ? 1.0 : config.mass[d];
    pd[d] = rng.next_normal() * std::sqrt(m);
    if (geo.frozen[d]) pd[d] = 0.0;
  }

  const double h0 = hamiltonian(spec, theta, p, config.mass);
  LeapfrogResult traj = leapfrog(spec, theta, p, config.step_size, config.n_leapfrog, config.mass);
  const double u = rng.next_double();

  TransitionResult out{theta, false, kInf};
  if (traj.divergent || h0 == kInf) return out;

  const double h1 = hamiltonian(spec, traj.theta, traj.momentum, config.mass);
  if (h1 == kInf || !is_feasible(plan_from_chart(traj.theta, spec.base()), kFeasTol)) return out;

  out.delta_h = h1 - h0;
  if (u < accept_probability(out.delta_h)) {
    out.theta = std::move(traj.theta);
    out.accepted = true;
  }
  return out;
}

}  // namespace

TransitionResult hmc_transition(const PosteriorSpec& spec, const ChartCoordinates& theta,
                                const HmcConfig& config, RandomStream& rng) {
  return transition_impl(spec, theta, config, axis_geometry(spec), rng);
}

namespace {

ChartCoordinates initialize_chain(const PosteriorSpec& spec, const HmcConfig& config,
                                  const AxisGeometry& geo, RandomStream& rng) {
  const int rows = spec.rows() - 1;
  const int cols = spec.cols() - 1;
  Matrix grad(rows, cols);
  for (int attempt = 0; attempt < config.jitter_attempts; ++attempt) {
    Matrix t(rows, cols);
    auto td = t.data();
    for (size_t d = 0; d < td.size(); ++d) {
      const double z = rng.next_normal();
      td[d] = geo.frozen[d] ? 0.0 : geo.jitter_scale[d] * z;
    }
    ChartCoordinates theta(std::move(t));
    if (point_ok(spec, theta) && grad_at(spec, theta, grad)) return theta;
  }
  throw InitializationError("run_chains: no feasible initialization found after " +
                            std::to_string(config.jitter_attempts) + " jitter attempts");
}

void run_one_chain(const PosteriorSpec& spec, const HmcConfig& config, const AxisGeometry& geo,
                   int chain, ChainResult& out, const ProgressCallback& progress,
                   std::mutex* progress_mutex) {
  RandomStream rng(config.seed, chain_stream(static_cast<std::uint64_t>(chain)));
  ChartCoordinates theta = initialize_chain(spec, config, geo, rng);

  HmcConfig local = config;
  if (local.mass.empty())
    local.mass.assign(static_cast<size_t>(spec.chart_dim()), 1.0);

  DualAveraging da;
  da.reset(local.step_size, local.target_accept);

  const int warmup = local.n_warmup;
  const int mass_window_start = warmup / 4;
  const int mass_window_end = 3 * warmup / 4;
  const bool do_mass = local.adapt_mass && warmup >= 40;
  std::vector<double> welford_mean, welford_m2;
  long long welford_n = 0;
  if (do_mass) {
    welford_mean.assign(local.mass.size(), 0.0);
    welford_m2.assign(local.mass.size(), 0.0);
  }

  const int total = warmup + local.n_samples;
  for (int it = 0; it < warmup; ++it) {
    local.step_size = da.current();
    TransitionResult tr = transition_impl(spec, theta, local, geo, rng);
    theta = std::move(tr.theta);
    const double alpha = tr.delta_h == kInf ? 0.0 : accept_probability(tr.delta_h);
    da.update(alpha);

    if (do_mass && it >= mass_window_start && it < mass_window_end) {
      ++welford_n;
      auto td = theta.theta().data();
      for (size_t d = 0; d < welford_mean.size(); ++d) {
        const double delta = td[d] - welford_mean[d];
        welford_mean[d] += delta / static_cast<double>(welford_n);
        welford_m2[d] += delta * (td[d] - welford_mean[d]);
      }
    }
    if (do_mass && it + 1 == mass_window_end && welford_n > 1) {
      for (size_t d = 0; d < local.mass.size(); ++d) {
        if (geo.frozen[d]) continue;
        const double var = welford_m2[d] / static_cast<double>(welford_n - 1);
        if (var > 1e-12) local.mass[d] = 1.0 / var;
      }
      da.reset(da.current(), local.target_accept);
    }
    if (progress && ((it + 1) % 500 == 0)) {
      std::lock_guard<std::mutex> lock(*progress_mutex);
      progress(chain, it + 1, total, 0.0);
    }
  }

  local.step_size = warmup > 0 ? da.averaged() : config.step_size;
  out.adapted_step = local.step_size;

  out.draws.reserve(static_cast<size_t>(local.n_samples));
  long long accepted = 0;
  for (int it = 0; it < local.n_samples; ++it) {
    TransitionResult tr = transition_impl(spec, theta, local, geo, rng);
    theta = std::move(tr.theta);
    if (tr.accepted) ++accepted;
    out.draws.push_back(theta);
    if (progress && ((it + 1) % 500 == 0 || it + 1 == local.n_samples)) {
      std::lock_guard<std::mutex> lock(*progress_mutex);
      progress(chain, warmup + it + 1, total,
               static_cast<double>(accepted) / static_cast<double>(it + 1));
    }
  }
  out.accept_rate = static_cast<double>(accepted) / static_cast<double>(local.n_samples);
}

int thread_budget(int n_chains) {
  int budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  if (const char* env = std::getenv("BAYESOT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) budget = cap;
  }
  return std::min(budget, n_chains);
}

}  // namespace

SampleSet run_chains(const PosteriorSpec& spec, const HmcConfig& config,
                     const ProgressCallback& progress) {
  config.validate(spec.chart_dim());

  SampleSet set{spec.rows() - 1, spec.cols() - 1, {}, {}, spec.base()};
  set.chains.resize(static_cast<size_t>(config.n_chains));

  if (spec.chart_dim() == 0) {
    // single-point polytope: degenerate chains of the unique plan
    for (auto& chain : set.chains) {
      chain.draws.assign(static_cast<size_t>(config.n_samples),
                         ChartCoordinates(Matrix(spec.rows() - 1, spec.cols() - 1)));
      chain.accept_rate = 1.0;
      chain.adapted_step = config.step_size;
    }
    set.diagnostics = compute_diagnostics(set);
    return set;
  }

  const AxisGeometry geo = axis_geometry(spec);
  std::mutex progress_mutex;

  const int workers = thread_budget(config.n_chains);
  if (workers <= 1) {
    for (int c = 0; c < config.n_chains; ++c)
      run_one_chain(spec, config, geo, c, set.chains[static_cast<size_t>(c)], progress,
                    &progress_mutex);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const int c = next.fetch_add(1);
          if (c >= config.n_chains) break;
          try {
            run_one_chain(spec, config, geo, c, set.chains[static_cast<size_t>(c)], progress,
                          &progress_mutex);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  set.diagnostics = compute_diagnostics(set);
  return set;
}

std::vector<EntrySummary> summarize(const SampleSet& samples, int bins) {
  if (samples.n_chains() == 0 || samples.draws_per_chain() == 0)
    throw std::invalid_argument("summarize: empty sample set");
  if (bins < 1) throw std::invalid_argument("summarize: bins must be >= 1");

  const int n = samples.base.rows();
  const int m = samples.base.cols();
  const long long total =
      static_cast<long long>(samples.n_chains()) * samples.draws_per_chain();

  std::vector<std::vector<double>> values(static_cast<size_t>(n) * m);
  for (auto& v : values) v.reserve(static_cast<size_t>(total));
  for (const auto& chain : samples.chains)
    for (const auto& draw : chain.draws) {
      const Matrix shift = chart_embed(draw);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
          values[static_cast<size_t>(i) * m + j].push_back(samples.base.entries()(i, j) +
                                                           shift(i, j));
    }

  auto quantile = [](const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  };

  std::vector<EntrySummary> out;
  out.reserve(values.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      auto& v = values[static_cast<size_t>(i) * m + j];
      EntrySummary s;
      s.i = i;
      s.j = j;
      const double mean = kernels::sum(v) / static_cast<double>(v.size());
      s.mean = mean;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      s.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;

      std::sort(v.begin(), v.end());
      s.q2_5 = quantile(v, 0.025);
      s.q25 = quantile(v, 0.25);
      s.q50 = quantile(v, 0.50);
      s.q75 = quantile(v, 0.75);
      s.q97_5 = quantile(v, 0.975);

      double lo = v.front();
      double hi = v.back();
      if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
      }
      const double range = hi - lo;
      s.bin_edges.resize(static_cast<size_t>(bins) + 1);
      for (int b = 0; b <= bins; ++b)
        s.bin_edges[static_cast<size_t>(b)] = lo + range * static_cast<double>(b) / bins;
      s.bin_edges.back() = hi;
      std::vector<long long> counts(static_cast<size_t>(bins), 0);
      for (double x : v) {
        int b = static_cast<int>((x - lo) / range * bins);
        if (b < 0) b = 0;
        if (b >= bins) b = bins - 1;
        ++counts[static_cast<size_t>(b)];
      }
      s.bin_mass.resize(static_cast<size_t>(bins));
      for (int b = 0; b < bins; ++b)
        s.bin_mass[static_cast<size_t>(b)] =
            static_cast<double>(counts[static_cast<size_t>(b)]) / static_cast<double>(v.size());
      out.push_back(std::move(s));
    }
  return out;
}

namespace {

// Stan-style split-chain ESS with Geyer initial-positive-pair truncation.
double ess_for_coord(const std::vector<std::vector<double>>& seqs) {
  const size_t m_seq = seqs.size();
  const size_t len = seqs[0].size();
  if (len < 2) return static_cast<double>(m_seq * len);

  std::vector<double> means(m_seq), vars(m_seq);
  double grand = 0.0;
  for (size_t c = 0; c < m_seq; ++c) {
    means[c] = kernels::sum(seqs[c]) / static_cast<double>(len);
    grand += means[c];
  }
  grand /= static_cast<double>(m_seq);

  double w = 0.0;
  for (size_t c = 0; c < m_seq; ++c) {
    double ss = 0.0;
    for (double x : seqs[c]) ss += (x - means[c]) * (x - means[c]);
    vars[c] = ss / static_cast<double>(len - 1);
    w += vars[c];
  }
  w /= static_cast<double>(m_seq);

  double b_over_l = 0.0;
  if (m_seq > 1) {
    for (size_t c = 0; c < m_seq; ++c) b_over_l += (means[c] - grand) * (means[c] - grand);
    b_over_l /= static_cast<double>(m_seq - 1);
  }
  const double var_plus =
      (static_cast<double>(len - 1) / static_cast<double>(len)) * w + b_over_l;
  if (!(var_plus > 0.0)) return static_cast<double>(m_seq * len);

  auto acov = [&](size_t c, size_t t) {
    double s = 0.0;
    for (size_t k = 0; k + t < len; ++k)
      s += (seqs[c][k] - means[c]) * (seqs[c][k + t] - means[c]);
    return s / static_cast<double>(len);
  };

  double tau = 0.0;
  double prev_pair = kInf;
  for (size_t t = 0; t + 1 < len; t += 2) {
    double rho_even = 0.0, rho_odd = 0.0;
    double mean_acov = 0.0;
    for (size_t c = 0; c < m_seq; ++c) mean_acov += acov(c, t);
    rho_even = 1.0 - (w - mean_acov / static_cast<double>(m_seq)) / var_plus;
    mean_acov = 0.0;
    for (size_t c = 0; c < m_seq; ++c) mean_acov += acov(c, t + 1);
    rho_odd = 1.0 - (w - mean_acov / static_cast<double>(m_seq)) / var_plus;

    double pair = rho_even + rho_odd;
    if (pair < 0.0) break;
    if (pair > prev_pair) pair = prev_pair;  // enforce monotone decrease
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau -= 1.0;
  if (tau < 1e-12) tau = 1e-12;
  return static_cast<double>(m_seq * len) / tau;
}

}  // namespace

Diagnostics compute_diagnostics(const SampleSet& samples) {
  Diagnostics diag;
  for (const auto& chain : samples.chains) diag.accept_rate.push_back(chain.accept_rate);

  const long long dim = static_cast<long long>(samples.theta_rows) * samples.theta_cols;
  const int n_chains = samples.n_chains();
  const int n_draws = samples.draws_per_chain();
  if (dim == 0 || n_chains == 0 || n_draws < 4) return diag;

  const size_t half = static_cast<size_t>(n_draws) / 2;
  for (long long d = 0; d < dim; ++d) {
    std::vector<std::vector<double>> seqs;
    for (const auto& chain : samples.chains) {
      std::vector<double> first(half), second(half);
      for (size_t k = 0; k < half; ++k) {
        first[k] = chain.draws[k].theta().data()[static_cast<size_t>(d)];
        second[k] = chain.draws[half + k].theta().data()[static_cast<size_t>(d)];
      }
      seqs.push_back(std::move(first));
      seqs.push_back(std::move(second));
    }

    diag.ess.push_back(ess_for_coord(seqs));

    if (n_chains >= 2) {
      const size_t m_seq = seqs.size();
      const size_t len = half;
      std::vector<double> means(m_seq);
      double grand = 0.0;
      for (size_t c = 0; c < m_seq; ++c) {
        means[c] = kernels::sum(seqs[c]) / static_cast<double>(len);
        grand += means[c];
      }
      grand /= static_cast<double>(m_seq);
      double w = 0.0;
      for (size_t c = 0; c < m_seq; ++c) {
        double ss = 0.0;
        for (double x : seqs[c]) ss += (x - means[c]) * (x - means[c]);
        w += ss / static_cast<double>(len - 1);
      }
      w /= static_cast<double>(m_seq);
      double b_over_l = 0.0;
      for (size_t c = 0; c < m_seq; ++c) b_over_l += (means[c] - grand) * (means[c] - grand);
      b_over_l /= static_cast<double>(m_seq - 1);
      const double var_plus =
          (static_cast<double>(len - 1) / static_cast<double>(len)) * w + b_over_l;
      diag.rhat.push_back(w > 0.0 ? std::sqrt(var_plus / w) : 1.0);
    }
  }
  return diag;
}

}  // namespace bayesot
