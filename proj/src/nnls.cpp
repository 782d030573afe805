#include "efmcg/nnls.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace efmcg {

namespace {

Eigen::VectorXd least_squares_on(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<std::size_t>& passive) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(passive[k]));
  // Least-norm solution when the passive columns are dependent.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  return cod.solve(b);
}

MasterSolution finish(const MasterProblem& mp, Eigen::VectorXd w, std::size_t iterations) {
  MasterSolution s;
  if (w.size() == 0) {
    s.residual = -mp.q;
    s.multipliers.resize(0);
  } else {
    s.residual = mp.columns * w - mp.q;
    s.multipliers = mp.columns.transpose() * s.residual;
  }
  s.objective = 0.5 * s.residual.squaredNorm();
  for (Eigen::Index l = 0; l < w.size(); ++l)
    if (w(l) > 0.0) s.active_set.push_back(static_cast<std::size_t>(l));
  s.w = std::move(w);
  s.iterations = iterations;
  return s;
}

class LawsonHanson {
 public:
  LawsonHanson(const MasterProblem& mp, const NnlsOptions& opt) : mp_(mp), opt_(opt), k_(static_cast<std::size_t>(mp.columns.cols())) {
    if (mp.q.size() == 0) throw InputError("master problem has no measurements");
    if (k_ && mp.columns.rows() != mp.q.size()) throw InputError("master problem: column length does not match Q");
    max_iter_ = opt.max_iterations ? opt.max_iterations : 3 * k_ + 10;
    w_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_));
    in_passive_.assign(k_, false);
  }

  MasterSolution run(const MasterSolution* warm) {
    if (k_ == 0) return finish(mp_, w_, 0);
    if (warm && warm->w.size() > 0) {
      const auto n = std::min<Eigen::Index>(warm->w.size(), w_.size());
      for (Eigen::Index l = 0; l < n; ++l) {
        if (warm->w(l) > 0.0) {
          w_(l) = warm->w(l);
          passive_.push_back(static_cast<std::size_t>(l));
          in_passive_[static_cast<std::size_t>(l)] = true;
        }
      }
      if (!passive_.empty()) descend_to_feasible();
    }

    std::vector<bool> rejected(k_, false);
    while (true) {
      const Eigen::VectorXd gradient = mp_.columns.transpose() * (mp_.columns * w_ - mp_.q);
      std::size_t entering = k_;
      double most_negative = -opt_.tol_kkt;
      for (std::size_t l = 0; l < k_; ++l) {
        if (in_passive_[l] || rejected[l]) continue;
        if (gradient(static_cast<Eigen::Index>(l)) < most_negative) {
          most_negative = gradient(static_cast<Eigen::Index>(l));
          entering = l;
        }
      }
      if (entering == k_) break;

      if (++iterations_ > max_iter_) {
        std::ostringstream msg;
        msg << "master: iteration limit " << max_iter_ << " exceeded";
        throw MasterIterationLimit(msg.str(), finish(mp_, w_, iterations_));
      }

      passive_.push_back(entering);
      in_passive_[entering] = true;
      Eigen::VectorXd z = least_squares_on(mp_.columns, mp_.q, passive_);
      if (z(static_cast<Eigen::Index>(passive_.size() - 1)) <= 0.0) {
        // Column is numerically dependent on the passive set; back to its bound.
        passive_.pop_back();
        in_passive_[entering] = false;
        rejected[entering] = true;
        continue;
      }
      descend_to_feasible(std::move(z));
      std::fill(rejected.begin(), rejected.end(), false);
    }
    return finish(mp_, w_, iterations_);
  }

 private:
  // Inner loop: move from the feasible w_ toward the unconstrained optimum
  // on the passive set, dropping indices that hit zero.
  void descend_to_feasible(Eigen::VectorXd z = {}) {
    if (z.size() == 0) z = least_squares_on(mp_.columns, mp_.q, passive_);
    for (std::size_t guard = 0; guard <= k_ + 1; ++guard) {
      bool all_positive = true;
      for (Eigen::Index i = 0; i < z.size(); ++i) all_positive &= z(i) > 0.0;
      if (all_positive) {
        for (std::size_t i = 0; i < passive_.size(); ++i) w_(static_cast<Eigen::Index>(passive_[i])) = z(static_cast<Eigen::Index>(i));
        return;
      }
      double step = 1.0;
      for (std::size_t i = 0; i < passive_.size(); ++i) {
        const double zi = z(static_cast<Eigen::Index>(i));
        if (zi > 0.0) continue;
        const double wi = w_(static_cast<Eigen::Index>(passive_[i]));
        step = std::min(step, wi / (wi - zi));
      }
      for (std::size_t i = 0; i < passive_.size(); ++i) {
        auto& wi = w_(static_cast<Eigen::Index>(passive_[i]));
        wi += step * (z(static_cast<Eigen::Index>(i)) - wi);
      }
      std::vector<std::size_t> kept;
      for (std::size_t i = 0; i < passive_.size(); ++i) {
        const std::size_t l = passive_[i];
        const double zi = z(static_cast<Eigen::Index>(i));
        auto& wl = w_(static_cast<Eigen::Index>(l));
        if (wl <= 1e-15 * std::max(1.0, w_.lpNorm<Eigen::Infinity>()) || (zi <= 0.0 && wl <= 1e-12)) {
          wl = 0.0;
          in_passive_[l] = false;
        } else {
          kept.push_back(l);
        }
      }
      passive_ = std::move(kept);
      if (passive_.empty()) return;
      z = least_squares_on(mp_.columns, mp_.q, passive_);
    }
    throw NumericalError("master: inner active-set loop did not settle");
  }

  const MasterProblem& mp_;
  NnlsOptions opt_;
  std::size_t k_;
  std::size_t max_iter_ = 0;
  std::size_t iterations_ = 0;
  Eigen::VectorXd w_;
  std::vector<std::size_t> passive_;
  std::vector<bool> in_passive_;
};

}  // namespace

MasterSolution solve_master(const MasterProblem& mp, const MasterSolution* warm, const NnlsOptions& options) {
  LawsonHanson solver(mp, options);
  return solver.run(warm);
}

Eigen::VectorXd compute_pricing(const Eigen::MatrixXd& stacked_design, const MasterSolution& solution,
                                kernels::Backend backend) {
  Eigen::VectorXd c;
  kernels::transposed_product(backend, stacked_design, solution.residual, c);
  return c;
}

}  // namespace efmcg
