#include "bayesot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace bayesot {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json read_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string(what) + ": " + path + ": " + e.what());
  }
  return j;
}

void write_json(const ordered_json& j, const std::string& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(what) + ": cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error(std::string(what) + ": write to " + path + " failed");
}

std::vector<double> number_array(const ordered_json& j, const std::string& path,
                                 const char* what) {
  if (!j.is_array()) throw std::runtime_error(std::string(what) + ": " + path + ": expected array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number())
      throw std::runtime_error(std::string(what) + ": " + path + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

ordered_json plan_to_json(const TransportPlan& plan) {
  ordered_json j;
  j["n"] = plan.rows();
  j["m"] = plan.cols();
  auto data = plan.entries().data();
  j["entries"] = std::vector<double>(data.begin(), data.end());
  auto rw = plan.row_marginal().weights();
  auto cw = plan.col_marginal().weights();
  j["row_marginal"] = std::vector<double>(rw.begin(), rw.end());
  j["col_marginal"] = std::vector<double>(cw.begin(), cw.end());
  return j;
}

TransportPlan plan_from_json(const ordered_json& j, const std::string& path) {
  for (const char* key : {"n", "m", "entries", "row_marginal", "col_marginal"})
    if (!j.contains(key))
      throw std::runtime_error("load_plan: " + path + ": missing field " + key);
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  std::vector<double> entries = number_array(j.at("entries"), path, "load_plan");
  DiscreteMeasure mu(number_array(j.at("row_marginal"), path, "load_plan"));
  DiscreteMeasure nu(number_array(j.at("col_marginal"), path, "load_plan"));
  return TransportPlan::make_marginal_checked(Matrix(n, m, std::move(entries)), std::move(mu),
                                              std::move(nu));
}

}  // namespace

DiscreteMeasure load_measure(const std::string& path) {
  const ordered_json j = read_json(path, "load_measure");
  return DiscreteMeasure(number_array(j, path, "load_measure"));
}

void save_measure(const DiscreteMeasure& measure, const std::string& path) {
  auto w = measure.weights();
  write_json(ordered_json(std::vector<double>(w.begin(), w.end())), path, "save_measure");
}

void save_plan(const TransportPlan& plan, const std::string& path) {
  write_json(plan_to_json(plan), path, "save_plan");
}

TransportPlan load_plan(const std::string& path) {
  return plan_from_json(read_json(path, "load_plan"), path);
}

void save_report(const SolverReport& report, const std::string& path, const std::string& method,
                 std::optional<double> epsilon, const std::string& regularizer_note) {
  ordered_json j;
  j["method"] = method;
  j["objective"] = report.objective;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["residual"] = report.residual;
  j["degenerate"] = report.degenerate;
  if (epsilon) j["epsilon"] = *epsilon;
  if (!regularizer_note.empty()) j["regularizer"] = regularizer_note;
  write_json(j, path, "save_report");
}

void save_sample_set(const SampleSet& set, const std::string& path, DrawsAs draws_as) {
  ordered_json j;
  j["theta_rows"] = set.theta_rows;
  j["theta_cols"] = set.theta_cols;
  j["draws_as"] = draws_as == DrawsAs::theta ? "theta" : "plan";
  j["base"] = plan_to_json(set.base);

  ordered_json chains = ordered_json::array();
  for (const auto& chain : set.chains) {
    ordered_json cj;
    cj["accept_rate"] = chain.accept_rate;
    cj["adapted_step"] = chain.adapted_step;
    ordered_json draws = ordered_json::array();
    for (const auto& draw : chain.draws) {
      if (draws_as == DrawsAs::theta) {
        auto d = draw.theta().data();
        draws.push_back(std::vector<double>(d.begin(), d.end()));
      } else {
        const TransportPlan p = plan_from_chart(draw, set.base);
        auto d = p.entries().data();
        draws.push_back(std::vector<double>(d.begin(), d.end()));
      }
    }
    cj["draws"] = std::move(draws);
    chains.push_back(std::move(cj));
  }
  j["chains"] = std::move(chains);

  ordered_json diag;
  diag["accept_rate"] = set.diagnostics.accept_rate;
  diag["ess"] = set.diagnostics.ess;
  if (set.chains.size() >= 2)
    diag["potential_scale_reduction"] = set.diagnostics.rhat;
  else
    diag["potential_scale_reduction"] = nullptr;
  j["diagnostics"] = std::move(diag);
  write_json(j, path, "save_sample_set");
}

SampleSet load_sample_set(const std::string& path) {
  const ordered_json j = read_json(path, "load_sample_set");
  for (const char* key : {"theta_rows", "theta_cols", "draws_as", "base", "chains", "diagnostics"})
    if (!j.contains(key))
      throw std::runtime_error("load_sample_set: " + path + ": missing field " + key);

  const int tr = j.at("theta_rows").get<int>();
  const int tc = j.at("theta_cols").get<int>();
  const bool theta_form = j.at("draws_as").get<std::string>() == "theta";
  TransportPlan base = plan_from_json(j.at("base"), path);

  SampleSet set{tr, tc, {}, {}, std::move(base)};
  for (const auto& cj : j.at("chains")) {
    ChainResult chain;
    chain.accept_rate = cj.at("accept_rate").get<double>();
    chain.adapted_step = cj.at("adapted_step").get<double>();
    for (const auto& dj : cj.at("draws")) {
      std::vector<double> vals = number_array(dj, path, "load_sample_set");
      if (theta_form) {
        if (vals.size() != static_cast<size_t>(tr) * tc)
          throw std::runtime_error("load_sample_set: " + path + ": draw size mismatch");
        chain.draws.emplace_back(Matrix(tr, tc, std::move(vals)));
      } else {
        const int n = set.base.rows();
        const int m = set.base.cols();
        if (vals.size() != static_cast<size_t>(n) * m)
          throw std::runtime_error("load_sample_set: " + path + ": draw size mismatch");
        TransportPlan p = TransportPlan::make_marginal_checked(
            Matrix(n, m, std::move(vals)), set.base.row_marginal(), set.base.col_marginal());
        chain.draws.push_back(chart_from_plan(p, set.base));
      }
    }
    set.chains.push_back(std::move(chain));
  }

  const auto& diag = j.at("diagnostics");
  set.diagnostics.accept_rate = diag.at("accept_rate").get<std::vector<double>>();
  set.diagnostics.ess = diag.at("ess").get<std::vector<double>>();
  if (diag.contains("potential_scale_reduction") && !diag.at("potential_scale_reduction").is_null())
    set.diagnostics.rhat = diag.at("potential_scale_reduction").get<std::vector<double>>();
  return set;
}

void save_summary(const std::vector<EntrySummary>& summary, const std::string& path,
                  OutputFormat format) {
  if (format == OutputFormat::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : summary) {
      ordered_json e;
      e["i"] = s.i;
      e["j"] = s.j;
      e["mean"] = s.mean;
      e["stddev"] = s.stddev;
      e["q2.5"] = s.q2_5;
      e["q25"] = s.q25;
      e["q50"] = s.q50;
      e["q75"] = s.q75;
      e["q97.5"] = s.q97_5;
      arr.push_back(std::move(e));
    }
    write_json(arr, path, "save_summary");
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_summary: cannot open " + path + " for writing");
  out << "i,j,mean,stddev,q2.5,q25,q50,q75,q97.5\n";
  char buf[512];
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.i, s.j,
                  s.mean, s.stddev, s.q2_5, s.q25, s.q50, s.q75, s.q97_5);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_summary: write to " + path + " failed");
}

void save_diagnostics(const Diagnostics& diagnostics, const std::string& path) {
  ordered_json j;
  j["accept_rate"] = diagnostics.accept_rate;
  j["ess"] = diagnostics.ess;
  if (!diagnostics.rhat.empty())
    j["potential_scale_reduction"] = diagnostics.rhat;
  else
    j["potential_scale_reduction"] = nullptr;
  write_json(j, path, "save_diagnostics");
}

void save_histogram_csv(const std::vector<double>& edges, const std::vector<double>& mass,
                        const std::string& path) {
  if (edges.size() != mass.size() + 1)
    throw std::invalid_argument("save_histogram_csv: edges must have mass.size()+1 entries");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_histogram_csv: cannot open " + path + " for writing");
  out << "bin_left_edge,bin_right_edge,mass\n";
  char buf[256];
  for (size_t b = 0; b < mass.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", edges[b], edges[b + 1], mass[b]);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_histogram_csv: write to " + path + " failed");
}

RunConfig load_run_config(const std::string& path) {
  const ordered_json j = read_json(path, "load_run_config");
  if (!j.is_object()) throw std::runtime_error("load_run_config: " + path + ": expected object");
  RunConfig cfg;

  auto get_string = [&](const char* key, std::string& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
  };
  get_string("mu", cfg.mu_path);
  get_string("nu", cfg.nu_path);
  get_string("ensemble", cfg.ensemble_path);
  get_string("condition", cfg.condition);
  get_string("output_dir", cfg.output_dir);
  if (j.contains("cost_scale")) cfg.cost_scale = j.at("cost_scale").get<double>();
  if (j.contains("format")) {
    const std::string f = j.at("format").get<std::string>();
    if (f != "json" && f != "csv")
      throw std::runtime_error("load_run_config: format must be json or csv");
    cfg.format = f == "json" ? OutputFormat::json : OutputFormat::csv;
  }
  if (j.contains("draws_as")) {
    const std::string d = j.at("draws_as").get<std::string>();
    if (d != "theta" && d != "plan")
      throw std::runtime_error("load_run_config: draws_as must be theta or plan");
    cfg.draws_as = d == "theta" ? DrawsAs::theta : DrawsAs::plan;
  }
  if (j.contains("bins")) cfg.bins = j.at("bins").get<int>();

  if (j.contains("prior")) {
    const auto& p = j.at("prior");
    if (p.contains("kind")) cfg.prior_kind = p.at("kind").get<std::string>();
    if (p.contains("epsilon")) cfg.prior_epsilon = p.at("epsilon").get<double>();
    if (p.contains("q")) cfg.prior_q = p.at("q").get<double>();
    if (p.contains("alpha")) {
      if (p.at("alpha").is_number())
        cfg.alpha_scalar = p.at("alpha").get<double>();
      else
        cfg.alpha_values = number_array(p.at("alpha"), path, "load_run_config");
    }
    if (p.contains("mean")) cfg.gaussian_mean = number_array(p.at("mean"), path, "load_run_config");
    if (p.contains("precision_diag"))
      cfg.gaussian_precision = number_array(p.at("precision_diag"), path, "load_run_config");
    if (p.contains("barrier")) cfg.barrier = p.at("barrier").get<std::string>();
    if (p.contains("barrier_epsilon")) cfg.barrier_epsilon = p.at("barrier_epsilon").get<double>();
  }

  if (j.contains("hmc")) {
    const auto& h = j.at("hmc");
    if (h.contains("step_size")) cfg.hmc.step_size = h.at("step_size").get<double>();
    if (h.contains("n_leapfrog")) cfg.hmc.n_leapfrog = h.at("n_leapfrog").get<int>();
    if (h.contains("n_warmup")) cfg.hmc.n_warmup = h.at("n_warmup").get<int>();
    if (h.contains("n_samples")) cfg.hmc.n_samples = h.at("n_samples").get<int>();
    if (h.contains("n_chains")) cfg.hmc.n_chains = h.at("n_chains").get<int>();
    if (h.contains("target_accept")) cfg.hmc.target_accept = h.at("target_accept").get<double>();
    if (h.contains("seed")) cfg.hmc.seed = h.at("seed").get<std::uint64_t>();
    if (h.contains("adapt_mass")) cfg.hmc.adapt_mass = h.at("adapt_mass").get<bool>();
    if (h.contains("jitter_attempts")) cfg.hmc.jitter_attempts = h.at("jitter_attempts").get<int>();
    if (h.contains("mass")) cfg.hmc.mass = number_array(h.at("mass"), path, "load_run_config");
  }
  return cfg;
}

Prior build_prior(const RunConfig& config, int n, int m) {
  const size_t nm = static_cast<size_t>(n) * static_cast<size_t>(m);
  Prior prior = Prior::uniform();
  const std::string& kind = config.prior_kind;
  if (kind == "uniform" || kind == "constant") {
    prior = Prior::uniform();
  } else if (kind == "entropy") {
    prior = Prior::entropy(config.prior_epsilon);
  } else if (kind == "dirichlet") {
    Matrix alpha(n, m, 1.0);
    if (!config.alpha_values.empty()) {
      if (config.alpha_values.size() != nm)
        throw std::invalid_argument("prior: dirichlet alpha needs n*m values");
      alpha = Matrix(n, m, config.alpha_values);
    } else if (config.alpha_scalar) {
      alpha = Matrix(n, m, *config.alpha_scalar);
    }
    prior = Prior::dirichlet(std::move(alpha));
  } else if (kind == "gaussian") {
    std::vector<double> mean = config.gaussian_mean;
    if (mean.empty()) mean.assign(nm, 0.0);
    std::vector<double> prec = config.gaussian_precision;
    if (prec.empty()) prec.assign(nm, 1.0);
    if (mean.size() != nm || prec.size() != nm)
      throw std::invalid_argument("prior: gaussian mean/precision_diag need n*m values");
    prior = Prior::gaussian_diagonal(std::move(mean), std::move(prec));
  } else if (kind == "tsallis") {
    prior = Prior::tsallis(config.prior_epsilon, config.prior_q);
  } else {
    throw std::invalid_argument("prior: unknown kind '" + kind +
                                "' (uniform|constant|entropy|dirichlet|gaussian|tsallis)");
  }

  if (config.barrier == "none")
    prior.with_barrier(Prior::Barrier::none);
  else if (config.barrier == "entropy")
    prior.with_barrier(Prior::Barrier::entropy, config.barrier_epsilon);
  else if (config.barrier == "indicator")
    prior.with_barrier(Prior::Barrier::indicator);
  else if (config.barrier != "default")
    throw std::invalid_argument("prior: unknown barrier '" + config.barrier +
                                "' (default|none|entropy|indicator)");
  return prior;
}

Condition parse_condition(const std::string& s) {
  if (s == "forall") return Condition::forall;
  if (s == "exists") return Condition::exists;
  throw std::invalid_argument("condition must be 'forall' or 'exists', got '" + s + "'");
}

}  // namespace bayesot
