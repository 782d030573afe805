// Serial vs OpenMP timings for the two parallel kernels: the combinatorial
// adjacency test of the enumerator and the pricing product of the engine.
//
//   bench_kernels [--quick]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <vector>

#include "efmcg/kernels.hpp"

using namespace efmcg::kernels;

namespace {

double median_seconds(int reps, const std::function<void()>& f) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void row(const char* name, double serial, double omp, bool equal) {
  std::printf("%-34s serial %10.3f ms   openmp %10.3f ms   speedup %5.2fx   %s\n", name, serial * 1e3, omp * 1e3,
              serial / omp, equal ? "results identical" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 1 : 5;
  std::mt19937_64 rng(12345);
  std::printf("OpenMP threads: %d\n", max_threads());
  bool all_equal = true;

  // Adjacency: zero sets shaped like a mid-run of the enumerator (sparse
  // rays over ~100 columns).
  for (std::size_t rays : {quick ? std::size_t{300} : std::size_t{1500}, quick ? std::size_t{600} : std::size_t{3000}}) {
    const std::size_t bits = 110;
    ZeroSetTable z(bits);
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < rays; ++r) {
      const auto id = z.add();
      for (std::size_t b = 0; b < bits; ++b)
        if (rng() % 10 < 8) z.set(id, b);
      (r % 3 == 0 ? pos : r % 3 == 1 ? neg : pos).push_back(id);
    }
    std::vector<RayPair> a, b;
    const double ts = median_seconds(reps, [&] { a = adjacent_pairs_serial(z, pos, neg, 60); });
    const double to = median_seconds(reps, [&] { b = adjacent_pairs_omp(z, pos, neg, 60); });
    char name[64];
    std::snprintf(name, sizeof name, "adjacency (%zu rays)", rays);
    row(name, ts, to, a == b);
    all_equal = all_equal && a == b;
  }

  // Pricing product: stacked design of 24 metabolites x 6 repetitions over
  // extended networks of increasing size.
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index cols : {Eigen::Index{130}, Eigen::Index{2000}, quick ? Eigen::Index{5000} : Eigen::Index{50000}}) {
    const Eigen::MatrixXd d = Eigen::MatrixXd::NullaryExpr(144, cols, [&] { return normal(rng); });
    const Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(144, [&] { return normal(rng); });
    Eigen::VectorXd a, b;
    const int inner = cols < 5000 ? 200 : 10;
    const double ts = median_seconds(reps, [&] {
      for (int i = 0; i < inner; ++i) transposed_product_serial(d, r, a);
    });
    const double to = median_seconds(reps, [&] {
      for (int i = 0; i < inner; ++i) transposed_product_omp(d, r, b);
    });
    char name[64];
    std::snprintf(name, sizeof name, "pricing product (%td cols) x%d", cols, inner);
    row(name, ts, to, a == b);
    all_equal = all_equal && a == b;
  }
  return all_equal ? 0 : 1;
}
