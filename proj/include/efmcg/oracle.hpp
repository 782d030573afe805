#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "efmcg/kernels.hpp"
#include "efmcg/measurements.hpp"
#include "efmcg/network.hpp"
#include "efmcg/nnls.hpp"

namespace efmcg {

// Brute-force ground truth for small networks.

struct EnumerationLimits {
  std::size_t max_extended_columns = 24;
  std::size_t max_rays = 100000;
  std::chrono::milliseconds time_budget{60000};
  kernels::Backend backend = kernels::Backend::Serial;
};

struct Enumeration {
  std::vector<FluxMode> modes;  // each carries its exact ray, |extended|_1 = 1
  std::size_t two_cycles = 0;   // split-reaction cycles, not listed in modes
};

// Extreme rays of the extended cone {e >= 0, A_i e = 0} by incremental
// double description in exact integer arithmetic, folded back to the base
// network. Throws LimitError instead of returning a partial set.
Enumeration enumerate_efms(const Network& network, const EnumerationLimits& limits = {});

// Support minimality: the flux is elementary iff A_i restricted to its
// support has a one-dimensional null space. Throws FeasibilityError for the
// zero flux or an infeasible one.
bool is_elementary(const Network& network, const Eigen::VectorXd& folded, double tol_act = 1e-7,
                   double tol_feas = kDefaultTolFeas);

struct FullSolution {
  Enumeration enumeration;
  MasterSolution master;  // weights over enumeration.modes
  double objective = 0.0;  // |Q - S A_x E w|_2
};

// The fit over the complete EFM set.
FullSolution solve_full(const Network& network, const MeasurementSet& ms, const EnumerationLimits& limits = {});

}  // namespace efmcg
