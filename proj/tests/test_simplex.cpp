#include <random>

#include "doctest.h"
#include "efmcg/errors.hpp"
#include "efmcg/simplex.hpp"
#include "efmcg/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace efmcg;

namespace {

SubproblemLP toy_lp(double c1, double c2, double c3) {
  static const Network net = fixtures::toy_a();
  const ExtendedNetwork ext(net);
  return {Eigen::Vector3d(c1, c2, c3), ext.internal()};
}

}  // namespace

TEST_SUITE("lp-simplex") {

TEST_CASE("toy A: first pricing subproblem") {
  const auto v = solve_subproblem(toy_lp(-1, -0.6, -0.4));
  CHECK(v.objective == doctest::Approx(-0.8));
  CHECK(v.e.isApprox(Eigen::Vector3d(0.5, 0.5, 0)));
  CHECK(v.norm_bound_active);
  // Competing vertex is worse.
  CHECK(Eigen::Vector3d(-1, -0.6, -0.4).dot(Eigen::Vector3d(0.5, 0, 0.5)) == doctest::Approx(-0.7));
}

TEST_CASE("toy A: second pricing subproblem") {
  const auto v = solve_subproblem(toy_lp(-0.2, 0.2, -0.4));
  CHECK(v.objective == doctest::Approx(-0.3));
  CHECK(v.e.isApprox(Eigen::Vector3d(0.5, 0, 0.5)));
}

TEST_CASE("nonnegative costs stop at the origin") {
  const auto v = solve_subproblem(toy_lp(0.1, 0.2, 0.3));
  CHECK(v.objective == 0.0);
  CHECK(v.e.isZero());
  CHECK_FALSE(v.norm_bound_active);
}

TEST_CASE("size mismatch is rejected") {
  SubproblemLP lp{Eigen::Vector2d(1, 1), Eigen::MatrixXd::Ones(1, 3)};
  CHECK_THROWS(solve_subproblem(lp));
}

TEST_CASE("matches vertex enumeration on random instances") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  int negative = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const Network net = synthetic::random_network(rng);
    const ExtendedNetwork ext(net);
    SubproblemLP lp;
    lp.equality = ext.internal();
    lp.cost = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(ext.size()), [&] { return normal(rng); });
    const double expected = oracle::lp_min_by_vertices(lp.cost, lp.equality);
    const auto v = solve_subproblem(lp);
    CHECK(v.objective == doctest::Approx(expected).epsilon(1e-9));
    // The point is feasible and is a vertex.
    CHECK(v.e.minCoeff() >= -1e-12);
    CHECK((lp.equality * v.e).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(v.e.sum() <= 1 + 1e-12);
    if (v.objective < -1e-9) {
      ++negative;
      CHECK(verify_extreme_ray(ext, v.e).extreme);
    }
  }
  CHECK(negative > 50);
}

TEST_CASE("warm start reaches the same optimum") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Network net = synthetic::random_network(rng);
    const ExtendedNetwork ext(net);
    SubproblemLP lp;
    lp.equality = ext.internal();
    lp.cost = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(ext.size()), [&] { return normal(rng); });
    const auto first = solve_subproblem(lp);
    lp.cost += 0.3 * Eigen::VectorXd::NullaryExpr(lp.cost.size(), [&] { return normal(rng); });
    const auto cold = solve_subproblem(lp);
    const auto warm = solve_subproblem(lp, {}, &first.basis);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-10));
    CHECK(warm.warm_started);
  }
}

TEST_CASE("an invalid warm basis falls back to a cold start") {
  const auto lp = toy_lp(-1, -0.6, -0.4);
  const std::vector<std::size_t> bogus{0, 0};
  const auto v = solve_subproblem(lp, {}, &bogus);
  CHECK_FALSE(v.warm_started);
  CHECK(v.objective == doctest::Approx(-0.8));
}

TEST_CASE("degenerate instance with Bland's rule forced on") {
  // Many equal costs and parallel columns: lots of ties and zero steps.
  Eigen::MatrixXd a(2, 6);
  a << 1, 1, 1, -1, -1, -1,
       1, -1, 0, 1, -1, 0;
  SubproblemLP lp{Eigen::VectorXd::Constant(6, -1.0), a};
  SimplexOptions o;
  o.bland_after = 0;
  const auto v = solve_subproblem(lp, o);
  CHECK(v.objective == doctest::Approx(oracle::lp_min_by_vertices(lp.cost, a)));
  CHECK(v.objective == doctest::Approx(-1.0));
}

TEST_CASE("extreme-ray test on toy A") {
  const Network net = fixtures::toy_a();
  const ExtendedNetwork ext(net);
  const auto yes = verify_extreme_ray(ext, Eigen::Vector3d(0.5, 0.5, 0));
  CHECK(yes.extreme);
  CHECK(yes.rank == 2);
  CHECK(yes.required == 2);
  const auto no = verify_extreme_ray(ext, Eigen::Vector3d(1, 0.5, 0.5));
  CHECK_FALSE(no.extreme);
  CHECK(no.rank == 1);
  CHECK_THROWS_AS(verify_extreme_ray(ext, Eigen::Vector3d::Zero()), FeasibilityError);
  CHECK_THROWS_AS(verify_extreme_ray(ext, Eigen::Vector3d(1, 0, 0)), FeasibilityError);
}

TEST_CASE("extreme-ray test agrees with support enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Network net = synthetic::random_network(rng);
    const ExtendedNetwork ext(net);
    const auto rays = oracle::rays_by_support(ext.internal());
    for (const auto& r : rays) CHECK(verify_extreme_ray(ext, r).extreme);
    // Positive combinations of two distinct rays are not extreme.
    for (std::size_t i = 0; i + 1 < rays.size() && i < 4; ++i) {
      const Eigen::VectorXd mix = unit(rng) * rays[i] + unit(rng) * rays[i + 1];
      CHECK_FALSE(verify_extreme_ray(ext, mix).extreme);
    }
  }
}

}  // TEST_SUITE
