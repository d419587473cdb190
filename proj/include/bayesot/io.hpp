#ifndef BAYESOT_IO_HPP
#define BAYESOT_IO_HPP

#include <optional>
#include <string>

#include "bayesot/hmc.hpp"
#include "bayesot/ot_solvers.hpp"
#include "bayesot/polytope.hpp"
#include "bayesot/posterior.hpp"

namespace bayesot {

enum class OutputFormat { json, csv };
enum class DrawsAs { theta, plan };

/// Marginals file: JSON array of nonnegative numbers; construction applies
/// the measure renormalization rule.
DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& measure, const std::string& path);

/// Plans are always JSON (self-validating: marginals attached).
void save_plan(const TransportPlan& plan, const std::string& path);
TransportPlan load_plan(const std::string& path);

void save_report(const SolverReport& report, const std::string& path,
                 const std::string& method, std::optional<double> epsilon = std::nullopt,
                 const std::string& regularizer_note = "");

/// SampleSet serialization. Theta-form files reload bit-exactly; plan-form
/// files are a flattened-plan view whose reload reconstructs coordinates
/// through the chart.
void save_sample_set(const SampleSet& set, const std::string& path, DrawsAs draws_as);
SampleSet load_sample_set(const std::string& path);

void save_summary(const std::vector<EntrySummary>& summary, const std::string& path,
                  OutputFormat format);
void save_diagnostics(const Diagnostics& diagnostics, const std::string& path);

/// Histogram CSV: bin_left_edge,bin_right_edge,mass triples.
void save_histogram_csv(const std::vector<double>& edges, const std::vector<double>& mass,
                        const std::string& path);

/// CLI run configuration; fields mirror the config JSON schema and flags
/// override individual entries.
struct RunConfig {
  std::string mu_path;
  std::string nu_path;
  std::string ensemble_path;
  // prior
  std::string prior_kind = "uniform";
  double prior_epsilon = 1.0;
  double prior_q = 0.5;
  std::optional<double> alpha_scalar;      // dirichlet: broadcast concentration
  std::vector<double> alpha_values;        // dirichlet: full n*m values
  std::vector<double> gaussian_mean;       // empty = 0
  std::vector<double> gaussian_precision;  // empty = identity
  std::string barrier = "default";         // default|none|entropy|indicator
  double barrier_epsilon = 1e-3;
  // posterior
  std::string condition = "exists";
  double cost_scale = 1.0;
  HmcConfig hmc;
  // output
  std::string output_dir = ".";
  OutputFormat format = OutputFormat::json;
  DrawsAs draws_as = DrawsAs::theta;
  int bins = 50;
};

RunConfig load_run_config(const std::string& path);

/// Builds the Prior described by a RunConfig for an n x m problem.
Prior build_prior(const RunConfig& config, int n, int m);

Condition parse_condition(const std::string& s);

}  // namespace bayesot

#endif
