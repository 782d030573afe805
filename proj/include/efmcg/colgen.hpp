#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efmcg/kernels.hpp"
#include "efmcg/measurements.hpp"
#include "efmcg/network.hpp"
#include "efmcg/nnls.hpp"
#include "efmcg/simplex.hpp"

namespace efmcg {

struct EngineConfig {
  // Pricing threshold; unset means 1e-8 * (1 + |Q|_inf).
  std::optional<double> tol_price;
  double tol_feas = kDefaultTolFeas;
  double tol_kkt = kDefaultTolKkt;
  double tol_act = 1e-7;
  std::size_t max_iterations = 1000;
  bool keep_zero_weight_modes = false;
  bool warm_start_subproblem = true;
  kernels::Backend backend = kernels::Backend::Serial;
  // Optional positive rescaling of each priced ray before it enters the
  // master. The answer must not depend on it.
  std::function<double(const FluxMode&)> mode_scale;

  // Throws InputError for non-positive tolerances or max_iterations == 0.
  void validate() const;
  double price_threshold(const Eigen::VectorXd& q) const;
};

struct TraceEntry {
  std::size_t iteration = 0;
  double objective_before = 0.0;  // |residual|_2 entering the iteration
  double objective_after = 0.0;
  double pricing_value = 0.0;     // optimal value of the subproblem
  std::optional<std::size_t> mode_added;  // index into ColGenResult::found
  ExtremeRayReport ray;
  // Lower bound on the decrease of 1/2|r|^2 from adding the column alone:
  // pricing^2 / (2 |column|^2).
  double decrease_bound = 0.0;
  bool degenerate = false;
  std::size_t simplex_pivots = 0;
};

struct ColGenResult {
  // Final modes after pruning, with their weights in the scale the master
  // used (|extended|_1 = 1 unless mode_scale says otherwise).
  std::vector<FluxMode> modes;
  Eigen::VectorXd weights;
  std::vector<MacroReaction> rendered;  // rendered weight = weight / factor
  double objective = 0.0;               // |Q - S A_x E_B w_B|_2
  bool certified = false;
  double certificate_pricing = 0.0;     // last subproblem optimum
  Eigen::VectorXd certificate_multipliers;  // lambda_B of the kept modes
  double tol_price = 0.0;
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  std::size_t pruned = 0;                // found but dropped with zero weight
  std::vector<FluxMode> found;           // every mode added, in order
  StackedSystem stacked;
  Eigen::VectorXd residual;              // stacked, S A_x E_B w_B - Q
};

// Column generation: E_B starts empty; each iteration prices every extended
// column with the master residual, solves the subproblem, and adds the
// optimal vertex while its value is below -tol_price.
ColGenResult run(const Network& network, const MeasurementSet& ms, const EngineConfig& config = {});

struct CertificateReport {
  bool refused = false;  // result was not certified
  bool passed = false;
  std::vector<std::string> violations;
  double max_multiplier_violation = 0.0;
  double complementarity = 0.0;
  std::optional<double> oracle_min_pricing;
  std::optional<std::size_t> violating_oracle_mode;
  std::optional<double> oracle_objective;
  std::optional<double> relative_gap;
};

// Recomputes the optimality conditions from the result's modes and weights;
// with an oracle EFM set also checks that no EFM prices below -tol_price and
// that the objective matches the full fit.
CertificateReport check_certificate(const Network& network, const MeasurementSet& ms, const ColGenResult& result,
                                    const std::vector<FluxMode>* oracle_modes = nullptr,
                                    const EngineConfig& config = {});

struct MetaboliteResidual {
  std::string metabolite;
  std::optional<double> norm;  // nullopt: no measured rows
};

// |Q_mb - S_mb A_x,mb E_B w_B|_2 per external metabolite, network order.
std::vector<MetaboliteResidual> residual_by_metabolite(const Network& network, const ColGenResult& result);

// |a - b| / max(|a|, |b|, 1e-8 * (1 + scale)).
double relative_gap(double a, double b, double scale);

}  // namespace efmcg
