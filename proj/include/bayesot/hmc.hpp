#ifndef BAYESOT_HMC_HPP
#define BAYESOT_HMC_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bayesot/posterior.hpp"
#include "bayesot/rng.hpp"

namespace bayesot {

/// Thrown when no feasible chain start is found within the jitter budget.
class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HmcConfig {
  double step_size = 1e-4;  // initial; dual averaging adapts it during warmup
  int n_leapfrog = 32;
  int n_warmup = 1000;
  int n_samples = 2500;
  int n_chains = 4;
  double target_accept = 0.8;
  std::uint64_t seed = 1;
  std::vector<double> mass;  // diagonal, chart-dim entries; empty = identity
  bool adapt_mass = false;   // re-estimate the diagonal mass from warmup draws
  int jitter_attempts = 100;

  void validate(long long chart_dim) const;
};

struct ChainResult {
  std::vector<ChartCoordinates> draws;
  double accept_rate = 0.0;
  double adapted_step = 0.0;
};

struct Diagnostics {
  std::vector<double> ess;   // per chart coordinate, row-major
  std::vector<double> rhat;  // split potential scale reduction; empty if < 2 chains
  std::vector<double> accept_rate;
};

/// Ordered posterior draws per chain with chain metadata. Draws are chart
/// coordinates; plans are materialized on demand through the stored base.
struct SampleSet {
  int theta_rows = 0;
  int theta_cols = 0;
  std::vector<ChainResult> chains;
  Diagnostics diagnostics;
  TransportPlan base;

  int n_chains() const { return static_cast<int>(chains.size()); }
  int draws_per_chain() const { return chains.empty() ? 0 : static_cast<int>(chains[0].draws.size()); }
  TransportPlan plan_at(int chain, int draw) const {
    return plan_from_chart(chains[static_cast<size_t>(chain)].draws[static_cast<size_t>(draw)], base);
  }
};

/// H(theta, p) = Q(theta) + 1/2 sum p_d^2 / m_d; +inf at excluded points.
double hamiltonian(const PosteriorSpec& spec, const ChartCoordinates& theta,
                   const Matrix& momentum, const std::vector<double>& mass);

struct LeapfrogResult {
  ChartCoordinates theta;
  Matrix momentum;
  bool divergent = false;  // an intermediate point left the polytope or energy blew up
};

/// Standard half-kick / drift / half-kick composition of n_steps leapfrog
/// steps. Time-reversible; feasibility is checked at every intermediate
/// point and failure is flagged, not thrown.
LeapfrogResult leapfrog(const PosteriorSpec& spec, const ChartCoordinates& theta,
                        const Matrix& momentum, double step_size, int n_steps,
                        const std::vector<double>& mass);

struct TransitionResult {
  ChartCoordinates theta;
  bool accepted = false;
  double delta_h = 0.0;
};

/// min(1, exp(-delta_h)): the Metropolis-Hastings acceptance probability
/// used by hmc_transition.
double accept_probability(double delta_h);

/// One HMC transition: sample momentum, integrate, accept with probability
/// min(1, exp(-delta_H)). Divergent or infeasible proposals are rejected.
TransitionResult hmc_transition(const PosteriorSpec& spec, const ChartCoordinates& theta,
                                const HmcConfig& config, RandomStream& rng);

using ProgressCallback = std::function<void(int chain, int iteration, int total, double accept_rate)>;

/// Runs n_chains independent chains from jittered feasible starts around
/// theta = 0, adapting step_size by dual averaging during warmup.
/// Deterministic given (seed, config, spec); chains use disjoint Philox
/// streams so their draws do not depend on n_chains or thread count.
/// BAYESOT_THREADS caps chain parallelism.
SampleSet run_chains(const PosteriorSpec& spec, const HmcConfig& config,
                     const ProgressCallback& progress = nullptr);

struct EntrySummary {
  int i = 0;
  int j = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double q2_5 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q97_5 = 0.0;
  std::vector<double> bin_edges;  // bins+1 edges
  std::vector<double> bin_mass;   // sums to 1
};

/// Per plan entry: mean, std, central quantiles and a normalized histogram,
/// pooled across chains.
std::vector<EntrySummary> summarize(const SampleSet& samples, int bins = 50);

/// Effective sample size (Geyer initial positive pair truncation) and split
/// potential scale reduction per chart coordinate.
Diagnostics compute_diagnostics(const SampleSet& samples);

}  // namespace bayesot

#endif
