#include "efmcg/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "efmcg/errors.hpp"

namespace efmcg {

namespace {

using IntRay = std::vector<Integer>;

// Rows of A_i scaled to integers; all-zero rows dropped.
std::vector<IntRay> integer_rows(const RationalMatrix& a) {
  std::vector<IntRay> rows;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    Integer lcm = 1;
    bool nonzero = false;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (sgn(a(r, c)) == 0) continue;
      nonzero = true;
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a(r, c).get_den_mpz_t());
    }
    if (!nonzero) continue;
    IntRay row(a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c) {
      Rational scaled = a(r, c) * lcm;
      row[c] = scaled.get_num();
    }
    rows.push_back(std::move(row));
  }
  // Sparse rows first keeps intermediate ray sets small.
  std::stable_sort(rows.begin(), rows.end(), [](const IntRay& x, const IntRay& y) {
    auto nz = [](const IntRay& v) { return std::count_if(v.begin(), v.end(), [](const Integer& z) { return sgn(z) != 0; }); };
    return nz(x) < nz(y);
  });
  return rows;
}

void normalize(IntRay& ray) {
  Integer g = 0;
  for (const auto& v : ray) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  if (g > 1)
    for (auto& v : ray) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

Integer dot(const IntRay& a, const IntRay& b) {
  Integer acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) acc += a[i] * b[i];
  return acc;
}

void rebuild_zero_sets(const std::vector<IntRay>& rays, kernels::ZeroSetTable& zeros) {
  zeros.clear();
  for (const auto& ray : rays) {
    const auto id = zeros.add();
    for (std::size_t j = 0; j < ray.size(); ++j)
      if (sgn(ray[j]) == 0) zeros.set(id, j);
  }
}

}  // namespace

Enumeration enumerate_efms(const Network& network, const EnumerationLimits& limits) {
  const ExtendedNetwork ext(network);
  const std::size_t n = ext.size();
  if (n > limits.max_extended_columns) {
    std::ostringstream msg;
    msg << "network has " << n << " extended columns, enumeration limit is " << limits.max_extended_columns;
    throw LimitError(msg.str());
  }
  const auto start = std::chrono::steady_clock::now();
  auto check_budget = [&](std::size_t candidate_rays) {
    if (candidate_rays > limits.max_rays) {
      std::ostringstream msg;
      msg << "enumeration exceeded " << limits.max_rays << " intermediate rays";
      throw LimitError(msg.str());
    }
    if (std::chrono::steady_clock::now() - start > limits.time_budget) throw LimitError("enumeration exceeded its time budget");
  };

  // Start from the nonnegative orthant: its extreme rays are the unit vectors.
  std::vector<IntRay> rays;
  for (std::size_t j = 0; j < n; ++j) {
    IntRay r(n, Integer(0));
    r[j] = 1;
    rays.push_back(std::move(r));
  }
  kernels::ZeroSetTable zeros(n);
  rebuild_zero_sets(rays, zeros);

  const auto rows = integer_rows(ext.internal_exact());
  std::size_t processed = 0;
  for (const auto& row : rows) {
    std::vector<Integer> value(rays.size());
    std::vector<std::size_t> zero, positive, negative;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      value[r] = dot(row, rays[r]);
      const int s = sgn(value[r]);
      (s == 0 ? zero : s > 0 ? positive : negative).push_back(r);
    }
    // A 2-face of the current cone needs n - 2 independent active
    // constraints, at most `processed` of which are hyperplanes.
    const std::size_t min_common = n >= processed + 2 ? n - processed - 2 : 0;
    const auto pairs = kernels::adjacent_pairs(limits.backend, zeros, positive, negative, min_common);
    check_budget(zero.size() + pairs.size());

    std::vector<IntRay> next;
    next.reserve(zero.size() + pairs.size());
    for (std::size_t r : zero) next.push_back(std::move(rays[r]));
    for (const auto& [p, q] : pairs) {
      // value[p] > 0 > value[q]; both weights are positive.
      IntRay combo(n);
      const Integer wp = -value[q];
      const Integer wq = value[p];
      for (std::size_t j = 0; j < n; ++j) combo[j] = wp * rays[p][j] + wq * rays[q][j];
      normalize(combo);
      next.push_back(std::move(combo));
    }
    rays = std::move(next);
    rebuild_zero_sets(rays, zeros);
    ++processed;
    check_budget(rays.size());
  }

  Enumeration out;
  for (const auto& ray : rays) {
    std::vector<Rational> q(ray.begin(), ray.end());
    auto folded = fold_ray_exact(ext, q);
    if (std::holds_alternative<Cycle>(folded)) {
      ++out.two_cycles;
      continue;
    }
    out.modes.push_back(std::get<FluxMode>(std::move(folded)));
  }
  return out;
}

bool is_elementary(const Network& network, const Eigen::VectorXd& folded, double tol_act, double tol_feas) {
  if (static_cast<std::size_t>(folded.size()) != network.reaction_count())
    throw FeasibilityError("flux size does not match the network");
  const double scale = folded.size() ? folded.lpNorm<Eigen::Infinity>() : 0.0;
  if (scale == 0.0) throw FeasibilityError("zero flux is not a flux mode");
  const Partition p = partition(network);
  if ((p.internal * folded).lpNorm<Eigen::Infinity>() > tol_feas * std::max(1.0, scale))
    throw FeasibilityError("flux violates the internal balance");
  for (std::size_t j : network.irreversible_reactions())
    if (folded(static_cast<Eigen::Index>(j)) < -tol_feas * std::max(1.0, scale))
      throw FeasibilityError("flux runs irreversible reaction " + network.reactions()[j].id + " backwards");

  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < network.reaction_count(); ++j)
    if (std::abs(folded(static_cast<Eigen::Index>(j))) > tol_act * scale) support.push_back(j);
  const auto rank = exact_rank(network.internal_stoichiometry().select_columns(support));
  return rank + 1 == support.size();
}

FullSolution solve_full(const Network& network, const MeasurementSet& ms, const EnumerationLimits& limits) {
  const StackedSystem sys = stack(ms, network);
  FullSolution full;
  full.enumeration = enumerate_efms(network, limits);
  const ExtendedNetwork ext(network);
  const Eigen::MatrixXd design = sys.apply(ext.external());
  MasterProblem mp;
  mp.q = sys.q;
  mp.columns.resize(sys.q.size(), static_cast<Eigen::Index>(full.enumeration.modes.size()));
  for (std::size_t l = 0; l < full.enumeration.modes.size(); ++l)
    mp.columns.col(static_cast<Eigen::Index>(l)) = design * full.enumeration.modes[l].extended;
  full.master = solve_master(mp);
  full.objective = full.master.residual.norm();
  return full;
}

}  // namespace efmcg
