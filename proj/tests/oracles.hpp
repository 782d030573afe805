#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library: plain subset enumeration on small instances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Extreme rays of {e >= 0, A e = 0} by support enumeration: a support S
// gives an extreme ray iff A[:,S] has a one-dimensional kernel spanned by a
// strictly positive vector. Rays are scaled to 1-norm 1. Exponential in
// A.cols(); meant for n <= 14.
inline std::vector<Eigen::VectorXd> rays_by_support(const Eigen::MatrixXd& a, double tol = 1e-9) {
  const auto n = static_cast<std::size_t>(a.cols());
  std::vector<Eigen::VectorXd> rays;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1u) cols.push_back(static_cast<Eigen::Index>(j));
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    Eigen::VectorXd v;
    if (a.rows() == 0) {
      if (cols.size() != 1) continue;
      v = Eigen::VectorXd::Ones(1);
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
      lu.setThreshold(tol);
      const Eigen::MatrixXd ker = lu.kernel();
      if (lu.dimensionOfKernel() != 1) continue;
      v = ker.col(0);
    }
    if (v.sum() < 0) v = -v;
    if (v.minCoeff() <= tol * v.lpNorm<Eigen::Infinity>()) continue;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < cols.size(); ++k) e(cols[k]) = v(static_cast<Eigen::Index>(k));
    rays.push_back(e / e.sum());
  }
  return rays;
}

// min c.e over {e >= 0, A e = 0, 1^T e <= 1}: the polytope's vertices are
// the origin and the normalized extreme rays.
inline double lp_min_by_vertices(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, Eigen::VectorXd* argmin = nullptr) {
  double best = 0.0;
  if (argmin) *argmin = Eigen::VectorXd::Zero(c.size());
  for (const auto& e : rays_by_support(a)) {
    const double v = c.dot(e);
    if (v < best) {
      best = v;
      if (argmin) *argmin = e;
    }
  }
  return best;
}

// min 1/2 |C w - q|^2 over w >= 0 by trying every passive set: the optimum
// is the unconstrained least-squares fit on some subset of columns with a
// nonnegative solution.
inline double nnls_by_subsets(const Eigen::MatrixXd& c, const Eigen::VectorXd& q, Eigen::VectorXd* argmin = nullptr) {
  const auto k = static_cast<std::size_t>(c.cols());
  double best = 0.5 * q.squaredNorm();
  if (argmin) *argmin = Eigen::VectorXd::Zero(c.cols());
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < k; ++j)
      if (mask >> j & 1u) cols.push_back(static_cast<Eigen::Index>(j));
    Eigen::MatrixXd sub(c.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = c.col(cols[i]);
    const Eigen::VectorXd w = sub.completeOrthogonalDecomposition().solve(q);
    if (w.size() && w.minCoeff() < -1e-12) continue;
    const double f = 0.5 * (sub * w - q).squaredNorm();
    if (f < best - 1e-15) {
      best = f;
      if (argmin) {
        *argmin = Eigen::VectorXd::Zero(c.cols());
        for (std::size_t i = 0; i < cols.size(); ++i) (*argmin)(cols[i]) = std::max(0.0, w(static_cast<Eigen::Index>(i)));
      }
    }
  }
  return best;
}

// Central-difference gradient of f at x.
template <class F>
Eigen::VectorXd numeric_gradient(F&& f, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

// Same ray up to positive scaling?
inline bool same_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double tol = 1e-7) {
  return ((x / x.sum()) - (y / y.sum())).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace oracle
