#ifndef BAYESOT_OT_SOLVERS_HPP
#define BAYESOT_OT_SOLVERS_HPP

#include <vector>

#include "bayesot/matrix.hpp"
#include "bayesot/polytope.hpp"

namespace bayesot {

/// Per-unit-mass transport costs. Entries are finite and nonnegative.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  int rows() const { return entries_.rows(); }
  int cols() const { return entries_.cols(); }

 private:
  Matrix entries_;
};

struct SolverReport {
  double objective = 0.0;
  long long iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max marginal violation
  bool degenerate = false;  // exact solver: a non-basic cell has zero reduced cost
};

/// sum_ij Gamma_ij C_ij
double transport_cost(const CostMatrix& cost, const TransportPlan& plan);

/// Exact OT by the transportation simplex. Returns a vertex-optimal plan;
/// under degeneracy ties break at the lowest row-major index. Problems with
/// n*m beyond size_cap are rejected.
std::pair<TransportPlan, SolverReport> exact_ot(const CostMatrix& cost, const DiscreteMeasure& mu,
                                                const DiscreteMeasure& nu,
                                                long long size_cap = 4096);

/// Entropy-regularized OT (minimizes <C,Gamma> - eps*H(Gamma)) by
/// Sinkhorn-Knopp scaling in the log domain. Convergence is max absolute
/// marginal violation <= tol, checked every iteration.
std::pair<TransportPlan, SolverReport> sinkhorn(const CostMatrix& cost, const DiscreteMeasure& mu,
                                                const DiscreteMeasure& nu, double epsilon,
                                                double tol = 1e-9, long long max_iter = 100000);

/// Strictly convex regularizers for regularized_ot.
struct Regularizer {
  enum class Kind { neg_entropy, quadratic, tsallis };

  Kind kind = Kind::neg_entropy;
  double q = 0.5;                   // tsallis exponent, in (0, 1)
  std::vector<double> mean;         // quadratic: center, empty = 0
  std::vector<double> weights;      // quadratic: diagonal metric, empty = identity

  static Regularizer neg_entropy();
  static Regularizer quadratic();
  static Regularizer quadratic_mahalanobis(std::vector<double> mean, std::vector<double> weights);
  static Regularizer tsallis(double q);
};

/// Minimizes <C,Gamma> + eps*R(Gamma) over the polytope by iterative
/// Bregman projections: dual-coordinate cyclic projections for the entropy
/// and Tsallis regularizers (whose domains enforce positivity), Dykstra
/// with an explicit nonnegativity step for the quadratic one.
std::pair<TransportPlan, SolverReport> regularized_ot(const CostMatrix& cost,
                                                      const DiscreteMeasure& mu,
                                                      const DiscreteMeasure& nu,
                                                      const Regularizer& reg, double epsilon,
                                                      double tol = 1e-9,
                                                      long long max_iter = 100000);

}  // namespace bayesot

#endif
