#ifndef BAYESOT_COST_MODELS_HPP
#define BAYESOT_COST_MODELS_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bayesot/posterior.hpp"

namespace bayesot {

/// Samplers over point locations in R^d.
struct PointMassAtom {
  std::vector<double> point;
};

struct EmpiricalAtom {
  std::vector<std::vector<double>> points;  // uniform over these
};

struct GaussianAtom {
  std::vector<double> mean;
  double sigma = 1.0;
};

using AtomSampler = std::variant<PointMassAtom, EmpiricalAtom, GaussianAtom>;

enum class GroundCost { squared_euclidean, euclidean };

/// Mass at stochastic locations: each cost sample draws one location per
/// atom and evaluates the ground cost pairwise.
struct HierarchicalModel {
  std::vector<AtomSampler> source_atoms;
  std::vector<AtomSampler> target_atoms;
  GroundCost ground_cost = GroundCost::squared_euclidean;

  int dimension() const;  // shared location dimension; throws on mismatch
};

/// Draws n_samples cost matrices. Each (sample, side, atom) triple owns a
/// disjoint Philox stream, so results do not depend on evaluation order.
CostEnsemble sample_cost(const HierarchicalModel& model, int n_samples, std::uint64_t seed);

/// C_ij = sqrt(2 - 2 exp(-gamma * ||p_i - e_j||_2)); entries in [0, sqrt 2).
CostMatrix profile_cost(const std::vector<std::vector<double>>& profiles_p,
                        const std::vector<std::vector<double>>& profiles_e, double gamma);

enum class EnsembleFormat { json, csv };

/// File schema (shared with the CLI): JSON object {n, m, samples:[row-major
/// n*m arrays]} or CSV with header sample,i,j,value and zero-based indices.
/// Save/load round-trips bit-exactly.
CostEnsemble load_ensemble(const std::string& path, EnsembleFormat format);
void save_ensemble(const CostEnsemble& ensemble, const std::string& path, EnsembleFormat format);

/// Picks the format from the file extension (.json / .csv).
EnsembleFormat ensemble_format_from_path(const std::string& path);

}  // namespace bayesot

#endif
