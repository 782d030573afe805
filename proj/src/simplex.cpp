#include "efmcg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "efmcg/errors.hpp"

namespace efmcg {

namespace {

// LU of a reference basis plus a product-form eta file for the pivots since.
class BasisFactor {
 public:
  void refactor(const Eigen::MatrixXd& basis_matrix) {
    lu_.compute(basis_matrix);
    etas_.clear();
    rcond_ = basis_matrix.size() == 0 ? 1.0 : lu_.rcond();
  }

  double rcond() const { return rcond_; }
  std::size_t updates() const { return etas_.size(); }

  // x := B^{-1} x
  void ftran(Eigen::VectorXd& x) const {
    if (x.size() == 0) return;
    x = lu_.solve(x);
    for (const auto& eta : etas_) {
      const double xr = x(eta.row) / eta.alpha(eta.row);
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (i != eta.row) x(i) -= eta.alpha(i) * xr;
      x(eta.row) = xr;
    }
  }

  // y := B^{-T} y
  void btran(Eigen::VectorXd& y) const {
    if (y.size() == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = y(it->row);
      for (Eigen::Index i = 0; i < y.size(); ++i)
        if (i != it->row) acc -= it->alpha(i) * y(i);
      y(it->row) = acc / it->alpha(it->row);
    }
    y = lu_.transpose().solve(y);
  }

  void update(Eigen::Index row, const Eigen::VectorXd& alpha) { etas_.push_back({row, alpha}); }

 private:
  struct Eta {
    Eigen::Index row;
    Eigen::VectorXd alpha;
  };
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<Eta> etas_;
  double rcond_ = 1.0;
};

class Simplex {
 public:
  Simplex(const SubproblemLP& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), n_(static_cast<std::size_t>(lp.cost.size())),
        mi_(static_cast<std::size_t>(lp.equality.rows())), m_(mi_ + 1), total_(n_ + 1 + mi_) {
    if (static_cast<std::size_t>(lp.equality.cols()) != n_ && mi_ > 0)
      throw InputError("subproblem: equality matrix has " + std::to_string(lp.equality.cols()) + " columns, cost has " +
                       std::to_string(n_));
    if (!lp.cost.allFinite()) throw InputError("subproblem: non-finite cost");
    cost_scale_ = std::max(1.0, n_ ? lp.cost.lpNorm<Eigen::Infinity>() : 0.0);
    max_pivots_ = opt.max_pivots ? opt.max_pivots : 50 * (m_ + n_);
  }

  VertexSolution run(const std::vector<std::size_t>* warm) {
    VertexSolution sol;
    if (warm && try_basis(*warm)) {
      sol.warm_started = true;
    } else {
      std::vector<std::size_t> cold(m_);
      for (std::size_t i = 0; i < mi_; ++i) cold[i] = artificial(i);
      cold[mi_] = slack();
      if (!try_basis(cold)) throw NumericalError("subproblem: initial basis is singular");
    }

    std::size_t stall = 0;
    Eigen::VectorXd y(m_), alpha(m_), column(m_);
    while (true) {
      if (sol.pivots >= max_pivots_) {
        std::ostringstream msg;
        msg << "subproblem: pivot limit " << max_pivots_ << " reached (" << sol.degenerate_pivots
            << " degenerate, bland=" << sol.bland_used << ")";
        throw NumericalError(msg.str());
      }
      const bool bland = stall >= opt_.bland_after;
      sol.bland_used |= bland;

      for (std::size_t i = 0; i < m_; ++i) y(i) = cost(basis_[i]);
      factor_.btran(y);

      const std::size_t entering = choose_entering(y, bland);
      if (entering == kNone) break;

      column_of(entering, column);
      alpha = column;
      factor_.ftran(alpha);

      const auto [leaving_row, step] = ratio_test(alpha, bland);
      if (leaving_row == kNone) throw NumericalError("subproblem: unbounded direction (cannot happen for a bounded LP)");

      for (std::size_t i = 0; i < m_; ++i) xb_(i) -= step * alpha(i);
      xb_(leaving_row) = step;
      position_[basis_[leaving_row]] = kNone;
      basis_[leaving_row] = entering;
      position_[entering] = leaving_row;

      ++sol.pivots;
      if (step <= 1e-12) {
        ++sol.degenerate_pivots;
        ++stall;
      } else {
        stall = 0;
      }

      factor_.update(static_cast<Eigen::Index>(leaving_row), alpha);
      if (factor_.updates() >= opt_.refactor_period) {
        if (!try_basis(basis_)) {
          std::ostringstream msg;
          msg << "subproblem: basis became singular after " << sol.pivots << " pivots (rcond " << factor_.rcond() << ")";
          throw NumericalError(msg.str());
        }
      }
    }

    sol.e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t v = basis_[i];
      if (v < n_) sol.e(static_cast<Eigen::Index>(v)) = std::abs(xb_(i)) < 1e-14 ? 0.0 : std::max(0.0, xb_(i));
    }
    sol.objective = n_ ? lp_.cost.dot(sol.e) : 0.0;
    sol.basis = basis_;
    const double scale = n_ ? std::max(sol.e.lpNorm<Eigen::Infinity>(), 1e-300) : 1.0;
    for (std::size_t j = 0; j < n_; ++j)
      if (sol.e(static_cast<Eigen::Index>(j)) <= opt_.tol_act * scale) sol.zero_columns.push_back(j);
    sol.norm_bound_active = std::abs(sol.e.sum() - 1.0) <= 1e-9;
    return sol;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t slack() const { return n_; }
  std::size_t artificial(std::size_t row) const { return n_ + 1 + row; }
  bool is_artificial(std::size_t v) const { return v > n_; }

  double cost(std::size_t v) const { return v < n_ ? lp_.cost(static_cast<Eigen::Index>(v)) : 0.0; }

  void column_of(std::size_t v, Eigen::VectorXd& col) const {
    col.setZero(static_cast<Eigen::Index>(m_));
    if (v < n_) {
      if (mi_) col.head(static_cast<Eigen::Index>(mi_)) = lp_.equality.col(static_cast<Eigen::Index>(v));
      col(static_cast<Eigen::Index>(mi_)) = 1.0;
    } else if (v == n_) {
      col(static_cast<Eigen::Index>(mi_)) = 1.0;
    } else {
      col(static_cast<Eigen::Index>(v - n_ - 1)) = 1.0;
    }
  }

  // Factorizes the given basis and recomputes x_B; false if it is singular
  // or infeasible.
  bool try_basis(const std::vector<std::size_t>& candidate) {
    if (candidate.size() != m_) return false;
    std::vector<std::size_t> pos(total_, kNone);
    for (std::size_t i = 0; i < m_; ++i) {
      if (candidate[i] >= total_ || pos[candidate[i]] != kNone) return false;
      pos[candidate[i]] = i;
    }
    Eigen::MatrixXd b(m_, m_);
    Eigen::VectorXd col;
    for (std::size_t i = 0; i < m_; ++i) {
      column_of(candidate[i], col);
      b.col(static_cast<Eigen::Index>(i)) = col;
    }
    BasisFactor f;
    f.refactor(b);
    if (!(f.rcond() > 1e-13)) return false;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    x(static_cast<Eigen::Index>(mi_)) = 1.0;
    f.ftran(x);
    for (std::size_t i = 0; i < m_; ++i) {
      if (x(i) < -1e-9) return false;
      if (is_artificial(candidate[i]) && std::abs(x(i)) > 1e-9) return false;
      if (std::abs(x(i)) < 1e-15) x(i) = 0.0;
    }
    factor_ = std::move(f);
    xb_ = x;
    basis_ = candidate;
    position_ = std::move(pos);
    return true;
  }

  std::size_t choose_entering(const Eigen::VectorXd& y, bool bland) const {
    const double tol = opt_.tol_reduced * cost_scale_;
    std::size_t best = kNone;
    double best_d = -tol;
    // Artificials are fixed at zero and never enter.
    for (std::size_t v = 0; v <= n_; ++v) {
      if (position_[v] != kNone) continue;
      double d = cost(v);
      if (v < n_) {
        if (mi_) d -= y.head(static_cast<Eigen::Index>(mi_)).dot(lp_.equality.col(static_cast<Eigen::Index>(v)));
        d -= y(static_cast<Eigen::Index>(mi_));
      } else {
        d -= y(static_cast<Eigen::Index>(mi_));
      }
      if (bland) {
        if (d < -tol) return v;
      } else if (d < best_d) {
        best_d = d;
        best = v;
      }
    }
    return best;
  }

  std::pair<std::size_t, double> ratio_test(const Eigen::VectorXd& alpha, bool bland) const {
    std::size_t best = kNone;
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = alpha(static_cast<Eigen::Index>(i));
      const std::size_t v = basis_[i];
      double t;
      if (a > opt_.tol_pivot) {
        t = std::max(xb_(static_cast<Eigen::Index>(i)), 0.0) / a;
      } else if (a < -opt_.tol_pivot && is_artificial(v)) {
        t = std::max(-xb_(static_cast<Eigen::Index>(i)), 0.0) / -a;
      } else {
        continue;
      }
      if (best == kNone || t < best_t - 1e-12) {
        best = i;
        best_t = t;
        continue;
      }
      if (t > best_t + 1e-12) continue;
      // Tie: drive artificials out first, then Bland's lowest index or the
      // most stable pivot.
      const std::size_t bv = basis_[best];
      const bool a_art = is_artificial(v), b_art = is_artificial(bv);
      bool take;
      if (a_art != b_art)
        take = a_art;
      else if (bland)
        take = v < bv;
      else
        take = std::abs(a) > std::abs(alpha(static_cast<Eigen::Index>(best))) ||
               (std::abs(a) == std::abs(alpha(static_cast<Eigen::Index>(best))) && v < bv);
      if (take) {
        best = i;
        best_t = std::min(best_t, t);
      }
    }
    return {best, best_t};
  }

  const SubproblemLP& lp_;
  SimplexOptions opt_;
  std::size_t n_, mi_, m_, total_;
  double cost_scale_ = 1.0;
  std::size_t max_pivots_ = 0;
  BasisFactor factor_;
  Eigen::VectorXd xb_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> position_;
};

}  // namespace

VertexSolution solve_subproblem(const SubproblemLP& lp, const SimplexOptions& options,
                                const std::vector<std::size_t>* warm_basis) {
  Simplex simplex(lp, options);
  return simplex.run(warm_basis);
}

ExtremeRayReport verify_extreme_ray(const ExtendedNetwork& ext, const Eigen::VectorXd& e, double tol_act,
                                    double tol_feas) {
  const std::size_t n = ext.size();
  if (static_cast<std::size_t>(e.size()) != n) throw FeasibilityError("flux size does not match the extended network");
  const double scale = n ? e.lpNorm<Eigen::Infinity>() : 0.0;
  if (scale == 0.0) throw FeasibilityError("zero vector is the extreme point of the cone, not a ray");
  if (e.minCoeff() < -tol_feas * std::max(1.0, scale)) throw FeasibilityError("flux has a negative component");
  if (ext.internal().rows() > 0 && (ext.internal() * e).lpNorm<Eigen::Infinity>() > tol_feas * std::max(1.0, scale))
    throw FeasibilityError("flux violates the internal balance");

  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < n; ++j)
    if (e(static_cast<Eigen::Index>(j)) > tol_act * scale) support.push_back(j);

  ExtremeRayReport report;
  report.support = support.size();
  report.active_bounds = n - support.size();
  report.required = n - 1;
  // Unit rows of the active bounds are independent of each other and span
  // exactly the off-support coordinates, so the remaining rank comes from
  // A_i restricted to the support.
  report.rank = report.active_bounds + exact_rank(ext.internal_exact().select_columns(support));
  report.extreme = report.rank >= report.required;
  return report;
}

}  // namespace efmcg
