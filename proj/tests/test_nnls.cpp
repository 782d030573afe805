#include <random>

#include "doctest.h"
#include "efmcg/nnls.hpp"
#include "oracles.hpp"

using namespace efmcg;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return normal(rng); });
}

void check_kkt(const MasterProblem& mp, const MasterSolution& s, double tol = 1e-8) {
  REQUIRE(s.w.size() == mp.columns.cols());
  CHECK(s.w.minCoeff() >= 0.0);
  const Eigen::VectorXd r = mp.columns * s.w - mp.q;
  CHECK((r - s.residual).norm() <= 1e-10 * (1 + r.norm()));
  const Eigen::VectorXd lambda = mp.columns.transpose() * r;
  CHECK(lambda.minCoeff() >= -tol);
  CHECK(std::abs(lambda.dot(s.w)) <= tol * (1 + s.w.norm()));
}

}  // namespace

TEST_SUITE("nnls-master") {

TEST_CASE("toy A after the first column") {
  MasterProblem mp;
  mp.q = Eigen::Vector3d(-1, 0.6, 0.4);
  mp.columns = Eigen::Vector3d(-0.5, 0.5, 0);
  const MasterSolution s = solve_master(mp);
  CHECK(s.w(0) == doctest::Approx(1.6));
  CHECK(s.residual.isApprox(Eigen::Vector3d(0.2, 0.2, -0.4)));
  const Eigen::VectorXd c = compute_pricing(Eigen::Matrix3d(Eigen::Vector3d(-1, 1, 1).asDiagonal()), s);
  CHECK(c.isApprox(Eigen::Vector3d(-0.2, 0.2, -0.4)));
}

TEST_CASE("toy A with both modes fits exactly") {
  MasterProblem mp;
  mp.q = Eigen::Vector3d(-1, 0.6, 0.4);
  mp.columns.resize(3, 2);
  mp.columns.col(0) = Eigen::Vector3d(-0.5, 0.5, 0);
  mp.columns.col(1) = Eigen::Vector3d(-0.5, 0, 0.5);
  const MasterSolution s = solve_master(mp);
  CHECK(s.w.isApprox(Eigen::Vector2d(1.2, 0.8)));
  CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("empty column set: residual is -Q") {
  MasterProblem mp;
  mp.q = Eigen::Vector3d(-1, 0.6, 0.4);
  mp.columns.resize(3, 0);
  const MasterSolution s = solve_master(mp);
  CHECK(s.w.size() == 0);
  CHECK(s.residual.isApprox(-mp.q));
  const Eigen::VectorXd c = compute_pricing(Eigen::Matrix3d(Eigen::Vector3d(-1, 1, 1).asDiagonal()), s);
  CHECK(c.isApprox(Eigen::Vector3d(-1, -0.6, -0.4)));
}

TEST_CASE("matches subset enumeration on random problems") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 8);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 9);
    MasterProblem mp;
    mp.columns = random_matrix(rng, m, k);
    mp.q = random_matrix(rng, m, 1).col(0);
    const MasterSolution s = solve_master(mp);
    const double expected = oracle::nnls_by_subsets(mp.columns, mp.q);
    CHECK(s.objective == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    check_kkt(mp, s);
  }
}

TEST_CASE("rank-deficient columns (duplicates and zero columns)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    MasterProblem mp;
    const Eigen::MatrixXd base = random_matrix(rng, 4, 3);
    mp.columns.resize(4, 6);
    mp.columns << base, base.col(0), Eigen::Vector4d::Zero(), 2.0 * base.col(2);
    mp.q = random_matrix(rng, 4, 1).col(0);
    const MasterSolution s = solve_master(mp);
    CHECK(s.objective == doctest::Approx(oracle::nnls_by_subsets(mp.columns, mp.q)).epsilon(1e-9).scale(1.0));
    check_kkt(mp, s);
  }
}

TEST_CASE("warm start from the previous solution after appending a column") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    MasterProblem mp;
    mp.columns = random_matrix(rng, 6, 3);
    mp.q = random_matrix(rng, 6, 1).col(0);
    const MasterSolution before = solve_master(mp);
    mp.columns.conservativeResize(Eigen::NoChange, 4);
    mp.columns.col(3) = random_matrix(rng, 6, 1).col(0);
    const MasterSolution warm = solve_master(mp, &before);
    const MasterSolution cold = solve_master(mp);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-10).scale(1.0));
    CHECK(warm.objective <= before.objective + 1e-12);
    check_kkt(mp, warm);
  }
}

TEST_CASE("multipliers are the gradient of the objective") {
  std::mt19937_64 rng(31);
  MasterProblem mp;
  mp.columns = random_matrix(rng, 5, 4);
  mp.q = random_matrix(rng, 5, 1).col(0);
  const MasterSolution s = solve_master(mp);
  auto f = [&](const Eigen::VectorXd& w) { return 0.5 * (mp.columns * w - mp.q).squaredNorm(); };
  const Eigen::VectorXd g = oracle::numeric_gradient(f, s.w);
  CHECK((g - s.multipliers).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("pricing vector is the gradient with respect to a flux") {
  // c = D^T r is d/de of 1/2 |D e - Q|^2 evaluated with the current fit.
  std::mt19937_64 rng(37);
  const Eigen::MatrixXd design = random_matrix(rng, 6, 5);
  const Eigen::VectorXd e = Eigen::VectorXd::Constant(5, 0.2);
  MasterProblem mp;
  mp.columns = design * e;
  mp.q = 2.0 * mp.columns + 0.1 * random_matrix(rng, 6, 1).col(0);
  const MasterSolution s = solve_master(mp);
  REQUIRE(s.w(0) > 0.5);
  auto f = [&](const Eigen::VectorXd& d) { return 0.5 * (s.w(0) * design * (e + d) - mp.q).squaredNorm(); };
  const Eigen::VectorXd g = oracle::numeric_gradient(f, Eigen::VectorXd::Zero(5)) / s.w(0);
  for (auto backend : {kernels::Backend::Serial, kernels::Backend::OpenMP})
    CHECK((compute_pricing(design, s, backend) - g).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("iteration limit reports the best iterate") {
  std::mt19937_64 rng(41);
  MasterProblem mp;
  mp.columns = random_matrix(rng, 10, 8);
  mp.q = random_matrix(rng, 10, 1).col(0);
  NnlsOptions o;
  o.max_iterations = 1;
  bool thrown = false;
  for (int attempt = 0; attempt < 20 && !thrown; ++attempt) {
    try {
      solve_master(mp, nullptr, o);
      mp.q = random_matrix(rng, 10, 1).col(0);
    } catch (const MasterIterationLimit& e) {
      thrown = true;
      CHECK(e.best().w.size() == 8);
      CHECK(e.best().w.minCoeff() >= 0.0);
    }
  }
  CHECK(thrown);
}

}  // TEST_SUITE
