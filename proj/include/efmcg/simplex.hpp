#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "efmcg/network.hpp"

namespace efmcg {

// minimize cost . e  subject to  equality * e = 0,  1^T e <= 1,  e >= 0
struct SubproblemLP {
  Eigen::VectorXd cost;
  Eigen::MatrixXd equality;  // rows = internal metabolites, cols = cost.size()
};

struct SimplexOptions {
  double tol_act = 1e-7;        // activity classification of e_j = 0
  double tol_pivot = 1e-9;      // smallest |alpha| accepted in the ratio test
  double tol_reduced = 1e-12;   // relative to max(1, |cost|_inf)
  std::size_t bland_after = 50; // consecutive degenerate pivots before Bland's rule
  std::size_t refactor_period = 32;
  std::size_t max_pivots = 0;   // 0: 50 * (rows + cols)
};

struct VertexSolution {
  Eigen::VectorXd e;
  double objective = 0.0;
  // Basic variables: 0..n-1 structural, n the slack of 1^T e <= 1, n+1+i the
  // (fixed) artificial of equality row i. Reusable as a warm start.
  std::vector<std::size_t> basis;
  // Structural columns at their bound e_j = 0.
  std::vector<std::size_t> zero_columns;
  bool norm_bound_active = false;
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
  bool bland_used = false;
  bool warm_started = false;
};

// Bounded revised simplex started from the all-slack/artificial basis at
// e = 0 (or from `warm_basis` when it is a valid feasible basis). Returns an
// optimal basic solution, i.e. a vertex of the feasible polyhedron. Throws
// NumericalError when the basis cannot be factorized or the pivot limit is
// hit.
VertexSolution solve_subproblem(const SubproblemLP& lp, const SimplexOptions& options = {},
                                const std::vector<std::size_t>* warm_basis = nullptr);

struct ExtremeRayReport {
  bool extreme = false;
  std::size_t rank = 0;      // rank of the active-constraint matrix
  std::size_t required = 0;  // n - 1
  std::size_t active_bounds = 0;
  std::size_t support = 0;
};

// n-1 independent active constraints among the rows of A_i e = 0 and the
// bounds e_j = 0 (rank is computed exactly on the rational A_i). Throws
// FeasibilityError for the zero vector or a point outside the cone.
ExtremeRayReport verify_extreme_ray(const ExtendedNetwork& ext, const Eigen::VectorXd& e, double tol_act = 1e-7,
                                    double tol_feas = kDefaultTolFeas);

}  // namespace efmcg
