#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "efmcg/errors.hpp"
#include "efmcg/kernels.hpp"

namespace efmcg {

inline constexpr double kDefaultTolKkt = 1e-8;

// minimize 1/2 |Q - C w|^2  subject to  w >= 0, where each column of C is
// one mode's stacked macroscopic stoichiometry.
struct MasterProblem {
  Eigen::MatrixXd columns;  // rows = length(Q)
  Eigen::VectorXd q;
};

struct MasterSolution {
  Eigen::VectorXd w;
  Eigen::VectorXd residual;     // C w - Q
  double objective = 0.0;       // 1/2 |residual|^2
  Eigen::VectorXd multipliers;  // C^T residual
  std::vector<std::size_t> active_set;  // w_l > 0
  std::size_t iterations = 0;
};

struct NnlsOptions {
  double tol_kkt = kDefaultTolKkt;
  std::size_t max_iterations = 0;  // 0: 3 * columns + 10
};

class MasterIterationLimit : public NumericalError {
 public:
  MasterIterationLimit(const std::string& what, MasterSolution best)
      : NumericalError(what), best_(std::move(best)) {}
  const MasterSolution& best() const noexcept { return best_; }

 private:
  MasterSolution best_;
};

// Lawson-Hanson active set. A warm start (typically the previous solution
// before columns were appended) seeds the passive set; extra columns start
// at zero.
MasterSolution solve_master(const MasterProblem& mp, const MasterSolution* warm = nullptr,
                            const NnlsOptions& options = {});

// c_j = sum over stacked rows of design(row, j) * residual(row); with the
// stacked extended A_x as design this is the pricing vector of every
// extended column.
Eigen::VectorXd compute_pricing(const Eigen::MatrixXd& stacked_design, const MasterSolution& solution,
                                kernels::Backend backend = kernels::Backend::Serial);

}  // namespace efmcg
