// bayesot: posterior inference over optimal-transport plans under stochastic
// costs. Subcommands: solve (exact/Sinkhorn baselines), map (MAP point
// estimates), sample (HMC over the transport polytope), toy (self-contained
// two-cost demonstration with a closed-form oracle).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bayesot/cost_models.hpp"
#include "bayesot/hmc.hpp"
#include "bayesot/io.hpp"
#include "bayesot/kernels.hpp"
#include "bayesot/posterior.hpp"

namespace fs = std::filesystem;
using namespace bayesot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void note_renormalization(const DiscreteMeasure& m, const std::string& which) {
  if (m.was_renormalized())
    std::cerr << "note: " << which << " weights were renormalized to sum to 1\n";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_output_dir(const std::string& dir) {
  if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

struct Inputs {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  CostEnsemble ensemble;
};

Inputs load_inputs(const RunConfig& cfg) {
  if (cfg.mu_path.empty() || cfg.nu_path.empty() || cfg.ensemble_path.empty())
    throw std::invalid_argument("mu, nu and ensemble paths are all required");
  DiscreteMeasure mu = load_measure(cfg.mu_path);
  DiscreteMeasure nu = load_measure(cfg.nu_path);
  note_renormalization(mu, "mu");
  note_renormalization(nu, "nu");
  CostEnsemble ensemble = load_ensemble(cfg.ensemble_path, ensemble_format_from_path(cfg.ensemble_path));
  if (ensemble.rows() != mu.size() || ensemble.cols() != nu.size())
    throw std::invalid_argument("ensemble shape " + std::to_string(ensemble.rows()) + "x" +
                                std::to_string(ensemble.cols()) + " does not match marginals " +
                                std::to_string(mu.size()) + "x" + std::to_string(nu.size()));
  return {std::move(mu), std::move(nu), std::move(ensemble)};
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const std::string& method, double epsilon, double tol,
              long long max_iter) {
  Inputs in = load_inputs(cfg);
  ensure_output_dir(cfg.output_dir);

  // ensemble -> average cost, the standard "average case" baseline
  CostMatrix mean_cost(in.ensemble.mean_matrix());

  TransportPlan plan = independent_coupling(in.mu, in.nu);
  SolverReport report;
  if (method == "exact") {
    std::tie(plan, report) = exact_ot(mean_cost, in.mu, in.nu);
    save_report(report, join_path(cfg.output_dir, "report.json"), "exact");
  } else if (method == "sinkhorn") {
    std::tie(plan, report) = sinkhorn(mean_cost, in.mu, in.nu, epsilon, tol, max_iter);
    save_report(report, join_path(cfg.output_dir, "report.json"), "sinkhorn", epsilon);
  } else {
    throw std::invalid_argument("solve: method must be exact or sinkhorn, got '" + method + "'");
  }
  save_plan(plan, join_path(cfg.output_dir, "plan.json"));
  if (!report.converged)
    throw NumericalFailure("solve: " + method + " did not converge in " +
                           std::to_string(report.iterations) + " iterations (residual " +
                           std::to_string(report.residual) + ")");
  return kExitOk;
}

int cmd_map(const RunConfig& cfg, double tol, long long max_iter) {
  Inputs in = load_inputs(cfg);
  ensure_output_dir(cfg.output_dir);

  const Prior prior = build_prior(cfg, in.mu.size(), in.nu.size());
  PosteriorSpec spec(std::move(in.ensemble), prior, parse_condition(cfg.condition),
                     independent_coupling(in.mu, in.nu), cfg.cost_scale);

  auto [plan, report] = map_estimate(spec, tol, max_iter);

  std::string regularizer;
  std::optional<double> eps;
  switch (prior.kind()) {
    case Prior::Kind::uniform:
      regularizer = "none (constant prior: exact OT on the summed cost)";
      break;
    case Prior::Kind::entropy:
      regularizer = "negative entropy (Sinkhorn on the summed cost)";
      eps = prior.epsilon();
      break;
    case Prior::Kind::gaussian:
      regularizer = "quadratic Mahalanobis (Bregman/Dykstra on the summed cost)";
      break;
    case Prior::Kind::tsallis:
      regularizer = "tsallis q=" + std::to_string(prior.q());
      eps = prior.epsilon();
      break;
    default:
      break;
  }
  save_plan(plan, join_path(cfg.output_dir, "map_plan.json"));
  save_report(report, join_path(cfg.output_dir, "map_report.json"), "map", eps, regularizer);
  if (!report.converged)
    throw NumericalFailure("map: solver did not converge (residual " +
                           std::to_string(report.residual) + ")");
  return kExitOk;
}

int cmd_sample(const RunConfig& cfg, bool progress) {
  Inputs in = load_inputs(cfg);
  ensure_output_dir(cfg.output_dir);

  const Prior prior = build_prior(cfg, in.mu.size(), in.nu.size());
  PosteriorSpec spec(std::move(in.ensemble), prior, parse_condition(cfg.condition),
                     independent_coupling(in.mu, in.nu), cfg.cost_scale);

  ProgressCallback callback;
  auto start = std::chrono::steady_clock::now();
  if (progress) {
    callback = [start](int chain, int iteration, int total, double accept) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::fprintf(stderr, "chain %d: %d/%d draws, accept %.3f, %.0f draws/s\n", chain, iteration,
                   total, accept, iteration / std::max(secs, 1e-9));
    };
  }

  SampleSet set = run_chains(spec, cfg.hmc, callback);
  save_sample_set(set, join_path(cfg.output_dir, "draws.json"), cfg.draws_as);
  const auto summary = summarize(set, cfg.bins);
  save_summary(summary, join_path(cfg.output_dir, cfg.format == OutputFormat::json ? "summary.json"
                                                                                   : "summary.csv"),
               cfg.format);
  save_diagnostics(set.diagnostics, join_path(cfg.output_dir, "diagnostics.json"));
  for (const auto& entry : summary) {
    char name[64];
    std::snprintf(name, sizeof(name), "hist_%d_%d.csv", entry.i, entry.j);
    save_histogram_csv(entry.bin_edges, entry.bin_mass, join_path(cfg.output_dir, name));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// toy: two 2x2 costs A/B whose average is flat, a single chart coordinate,
// and a closed-form posterior density proportional to cosh(20*theta).

struct ToyOracle {
  std::vector<double> grid;     // panel boundaries on [-1/4, 1/4]
  std::vector<double> density;  // normalized oracle density at grid points
  Condition condition;

  double cdf(double t) const {
    if (condition == Condition::forall) return (t + 0.25) / 0.5;
    const double s5 = std::sinh(5.0);
    return (std::sinh(20.0 * t) + s5) / (2.0 * s5);
  }
};

ToyOracle toy_oracle(Condition condition, int panels) {
  ToyOracle o;
  o.condition = condition;
  o.grid.resize(static_cast<size_t>(panels) + 1);
  o.density.resize(o.grid.size());
  double z = 0.0;
  for (int k = 0; k <= panels; ++k)
    o.grid[static_cast<size_t>(k)] = -0.25 + 0.5 * static_cast<double>(k) / panels;
  for (size_t k = 0; k < o.grid.size(); ++k)
    o.density[k] = condition == Condition::forall ? 1.0 : std::cosh(20.0 * o.grid[k]);
  for (size_t k = 0; k + 1 < o.grid.size(); ++k)
    z += 0.5 * (o.density[k] + o.density[k + 1]) * (o.grid[k + 1] - o.grid[k]);
  for (double& d : o.density) d /= z;
  return o;
}

int cmd_toy(RunConfig cfg, bool progress) {
  ensure_output_dir(cfg.output_dir);

  // ensemble {A, B}: equally likely costs with flat average
  std::vector<CostMatrix> costs;
  costs.emplace_back(Matrix(2, 2, {0.0, 10.0, 10.0, 0.0}));
  costs.emplace_back(Matrix(2, 2, {10.0, 0.0, 0.0, 10.0}));
  CostEnsemble ensemble(std::move(costs));
  save_ensemble(ensemble, join_path(cfg.output_dir, "toy_ensemble.json"), EnsembleFormat::json);

  DiscreteMeasure mu({0.5, 0.5});
  DiscreteMeasure nu({0.5, 0.5});
  const Condition condition = parse_condition(cfg.condition);
  PosteriorSpec spec(std::move(ensemble), Prior::uniform(), condition,
                     independent_coupling(mu, nu), cfg.cost_scale);

  ProgressCallback callback;
  if (progress)
    callback = [](int chain, int iteration, int total, double) {
      std::fprintf(stderr, "chain %d: %d/%d\n", chain, iteration, total);
    };
  SampleSet set = run_chains(spec, cfg.hmc, callback);

  // pooled theta draws against the oracle on fixed [-1/4, 1/4] bins
  std::vector<double> draws;
  draws.reserve(static_cast<size_t>(set.n_chains()) * set.draws_per_chain());
  for (const auto& chain : set.chains)
    for (const auto& d : chain.draws) draws.push_back(d.theta()(0, 0));

  const int bins = cfg.bins;
  const int panels_per_bin = std::max(1, 400 / bins);
  const ToyOracle oracle = toy_oracle(condition, bins * panels_per_bin);

  std::vector<double> edges(static_cast<size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    edges[static_cast<size_t>(b)] = -0.25 + 0.5 * static_cast<double>(b) / bins;
  std::vector<double> hist_mass(static_cast<size_t>(bins), 0.0);
  for (double t : draws) {
    int b = static_cast<int>((t + 0.25) / 0.5 * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    hist_mass[static_cast<size_t>(b)] += 1.0;
  }
  for (double& h : hist_mass) h /= static_cast<double>(draws.size());

  std::vector<double> oracle_mass(static_cast<size_t>(bins), 0.0);
  for (int b = 0; b < bins; ++b)
    for (int k = 0; k < panels_per_bin; ++k) {
      const size_t g = static_cast<size_t>(b) * panels_per_bin + k;
      oracle_mass[static_cast<size_t>(b)] += 0.5 * (oracle.density[g] + oracle.density[g + 1]) *
                                             (oracle.grid[g + 1] - oracle.grid[g]);
    }

  double tv = 0.0;
  for (int b = 0; b < bins; ++b)
    tv += std::abs(hist_mass[static_cast<size_t>(b)] - oracle_mass[static_cast<size_t>(b)]);
  tv *= 0.5;

  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  const double count = static_cast<double>(draws.size());
  for (size_t k = 0; k < draws.size(); ++k) {
    const double f = oracle.cdf(draws[k]);
    ks = std::max(ks, std::abs(f - static_cast<double>(k + 1) / count));
    ks = std::max(ks, std::abs(f - static_cast<double>(k) / count));
  }

  save_histogram_csv(edges, hist_mass, join_path(cfg.output_dir, "theta_hist.csv"));
  {
    std::ofstream out(join_path(cfg.output_dir, "density_grid.csv"));
    out << "theta,density\n";
    char buf[128];
    for (size_t k = 0; k < oracle.grid.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", oracle.grid[k], oracle.density[k]);
      out << buf;
    }
  }
  {
    nlohmann::ordered_json j;
    j["condition"] = cfg.condition;
    j["tv_distance"] = tv;
    j["ks_statistic"] = ks;
    j["n_draws"] = draws.size();
    j["bins"] = bins;
    j["seed"] = cfg.hmc.seed;
    std::ofstream out(join_path(cfg.output_dir, "result.json"));
    out << j.dump(2) << '\n';
  }
  std::cout << "toy: condition=" << cfg.condition << " tv=" << tv << " ks=" << ks << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for optimal transport with stochastic cost"};
  app.require_subcommand(1);

  std::string config_path;
  RunConfig cfg;
  bool progress = false;

  auto add_common = [&](CLI::App* sub, bool needs_inputs) {
    sub->add_option("--config", config_path, "JSON run configuration; flags override its fields");
    if (needs_inputs) {
      sub->add_option("--mu", cfg.mu_path, "row marginal JSON file");
      sub->add_option("--nu", cfg.nu_path, "column marginal JSON file");
      sub->add_option("--ensemble", cfg.ensemble_path, "cost ensemble file (.json or .csv)");
    }
    sub->add_option("-o,--output", cfg.output_dir, "output directory");
    sub->add_flag("--progress", progress, "print progress to stderr");
  };

  // solve
  auto* solve = app.add_subcommand("solve", "baseline OT on the ensemble's average cost");
  std::string method = "exact";
  double solve_epsilon = 0.1;
  double tol = 1e-9;
  long long max_iter = 100000;
  add_common(solve, true);
  solve->add_option("--method", method, "exact | sinkhorn");
  solve->add_option("--epsilon", solve_epsilon, "sinkhorn regularization weight");
  solve->add_option("--tol", tol, "marginal residual tolerance");
  solve->add_option("--max-iter", max_iter, "iteration cap");

  // map
  auto* map_cmd = app.add_subcommand("map", "MAP plan via regularized OT (condition forall)");
  add_common(map_cmd, true);
  std::string prior_kind, condition, barrier;
  double prior_epsilon = 0.0, prior_q = 0.0, cost_scale = 0.0, barrier_epsilon = 0.0;
  double alpha_scalar = 0.0;
  auto add_model_flags = [&](CLI::App* sub) {
    sub->add_option("--prior", prior_kind, "uniform|constant|entropy|dirichlet|gaussian|tsallis");
    sub->add_option("--prior-epsilon", prior_epsilon, "entropy/tsallis prior weight");
    sub->add_option("--q", prior_q, "tsallis exponent");
    sub->add_option("--alpha", alpha_scalar, "dirichlet concentration (broadcast)");
    sub->add_option("--condition", condition, "forall | exists");
    sub->add_option("--cost-scale", cost_scale, "likelihood temperature");
    sub->add_option("--barrier", barrier, "default|none|entropy|indicator");
    sub->add_option("--barrier-epsilon", barrier_epsilon, "entropy barrier weight");
  };
  add_model_flags(map_cmd);
  map_cmd->add_option("--tol", tol, "marginal residual tolerance");
  map_cmd->add_option("--max-iter", max_iter, "iteration cap");

  // sample
  auto* sample = app.add_subcommand("sample", "HMC sampling of the plan posterior");
  add_common(sample, true);
  add_model_flags(sample);
  int chains = 0, samples_n = 0, warmup = -1, leapfrog_n = 0, bins = 0;
  double step_size = 0.0, target_accept = 0.0;
  std::uint64_t seed = 0;
  bool seed_given = false, draws_as_plan = false;
  std::string out_format;
  auto add_hmc_flags = [&](CLI::App* sub) {
    sub->add_option("--chains", chains, "number of chains");
    sub->add_option("--samples", samples_n, "post-warmup draws per chain");
    sub->add_option("--warmup", warmup, "warmup iterations per chain");
    sub->add_option("--leapfrog", leapfrog_n, "leapfrog steps per transition");
    sub->add_option("--step-size", step_size, "initial step size");
    sub->add_option("--target-accept", target_accept, "dual averaging target");
    sub->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--bins", bins, "histogram bin count");
  };
  add_hmc_flags(sample);
  sample->add_flag("--draws-as-plan", draws_as_plan, "store draws as flattened plans");
  sample->add_option("--format", out_format, "json | csv (tabular outputs)");

  // toy
  auto* toy = app.add_subcommand("toy", "self-contained two-cost example with oracle comparison");
  add_common(toy, false);
  add_hmc_flags(toy);
  toy->add_option("--condition", condition, "forall | exists");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      RunConfig file_cfg = load_run_config(config_path);
      // paths/flags given on the command line win over the config file
      if (cfg.mu_path.empty()) cfg.mu_path = file_cfg.mu_path;
      if (cfg.nu_path.empty()) cfg.nu_path = file_cfg.nu_path;
      if (cfg.ensemble_path.empty()) cfg.ensemble_path = file_cfg.ensemble_path;
      if (cfg.output_dir == ".") cfg.output_dir = file_cfg.output_dir;
      const std::string mu = cfg.mu_path, nu = cfg.nu_path, ens = cfg.ensemble_path,
                        out = cfg.output_dir;
      cfg = file_cfg;
      cfg.mu_path = mu;
      cfg.nu_path = nu;
      cfg.ensemble_path = ens;
      cfg.output_dir = out;
    }
    if (!prior_kind.empty()) cfg.prior_kind = prior_kind;
    if (prior_epsilon > 0.0) cfg.prior_epsilon = prior_epsilon;
    if (prior_q > 0.0) cfg.prior_q = prior_q;
    if (alpha_scalar > 0.0) cfg.alpha_scalar = alpha_scalar;
    if (!condition.empty()) cfg.condition = condition;
    if (cost_scale > 0.0) cfg.cost_scale = cost_scale;
    if (!barrier.empty()) cfg.barrier = barrier;
    if (barrier_epsilon > 0.0) cfg.barrier_epsilon = barrier_epsilon;
    if (chains > 0) cfg.hmc.n_chains = chains;
    if (samples_n > 0) cfg.hmc.n_samples = samples_n;
    if (warmup >= 0) cfg.hmc.n_warmup = warmup;
    if (leapfrog_n > 0) cfg.hmc.n_leapfrog = leapfrog_n;
    if (step_size > 0.0) cfg.hmc.step_size = step_size;
    if (target_accept > 0.0) cfg.hmc.target_accept = target_accept;
    if (seed_given) cfg.hmc.seed = seed;
    if (bins > 0) cfg.bins = bins;
    if (draws_as_plan) cfg.draws_as = DrawsAs::plan;
    if (!out_format.empty()) {
      if (out_format != "json" && out_format != "csv")
        throw std::invalid_argument("--format must be json or csv");
      cfg.format = out_format == "json" ? OutputFormat::json : OutputFormat::csv;
    }

    if (solve->parsed()) return cmd_solve(cfg, method, solve_epsilon, tol, max_iter);
    if (map_cmd->parsed()) return cmd_map(cfg, tol, max_iter);
    if (sample->parsed()) return cmd_sample(cfg, progress);
    if (toy->parsed()) {
      if (condition.empty()) cfg.condition = "exists";
      if (!seed_given) cfg.hmc.seed = 7;
      return cmd_toy(cfg, progress);
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InitializationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
