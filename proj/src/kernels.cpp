#include "efmcg/kernels.hpp"

#include <bit>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace efmcg::kernels {

std::size_t ZeroSetTable::add() {
  data_.resize(data_.size() + words_, 0);
  return count_++;
}

std::size_t ZeroSetTable::count(std::size_t ray) const {
  std::size_t n = 0;
  const auto* r = row(ray);
  for (std::size_t w = 0; w < words_; ++w) n += static_cast<std::size_t>(std::popcount(r[w]));
  return n;
}

namespace {

bool is_adjacent(const ZeroSetTable& zeros, std::size_t p, std::size_t n, std::size_t min_common,
                 std::vector<std::uint64_t>& common) {
  const std::size_t words = zeros.words();
  const auto* zp = zeros.row(p);
  const auto* zn = zeros.row(n);
  std::size_t size = 0;
  for (std::size_t w = 0; w < words; ++w) {
    common[w] = zp[w] & zn[w];
    size += static_cast<std::size_t>(std::popcount(common[w]));
  }
  if (size < min_common) return false;
  const std::size_t total = zeros.size();
  for (std::size_t r = 0; r < total; ++r) {
    if (r == p || r == n) continue;
    const auto* zr = zeros.row(r);
    bool superset = true;
    for (std::size_t w = 0; w < words && superset; ++w) superset = (common[w] & ~zr[w]) == 0;
    if (superset) return false;
  }
  return true;
}

}  // namespace

std::vector<RayPair> adjacent_pairs_serial(const ZeroSetTable& zeros, std::span<const std::size_t> positive,
                                           std::span<const std::size_t> negative, std::size_t min_common) {
  std::vector<RayPair> out;
  std::vector<std::uint64_t> common(zeros.words());
  for (std::size_t p : positive)
    for (std::size_t n : negative)
      if (is_adjacent(zeros, p, n, min_common, common)) out.emplace_back(p, n);
  return out;
}

std::vector<RayPair> adjacent_pairs_omp(const ZeroSetTable& zeros, std::span<const std::size_t> positive,
                                        std::span<const std::size_t> negative, std::size_t min_common) {
  const auto np = static_cast<std::ptrdiff_t>(positive.size());
  std::vector<std::vector<RayPair>> per_positive(positive.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> common(zeros.words());
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < np; ++i) {
      const std::size_t p = positive[static_cast<std::size_t>(i)];
      for (std::size_t n : negative)
        if (is_adjacent(zeros, p, n, min_common, common)) per_positive[static_cast<std::size_t>(i)].emplace_back(p, n);
    }
  }
  std::vector<RayPair> out;
  for (auto& part : per_positive) out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::vector<RayPair> adjacent_pairs(Backend backend, const ZeroSetTable& zeros, std::span<const std::size_t> positive,
                                    std::span<const std::size_t> negative, std::size_t min_common) {
  return backend == Backend::OpenMP ? adjacent_pairs_omp(zeros, positive, negative, min_common)
                                    : adjacent_pairs_serial(zeros, positive, negative, min_common);
}

void transposed_product_serial(const Eigen::MatrixXd& design, const Eigen::VectorXd& residual, Eigen::VectorXd& out) {
  const Eigen::Index rows = design.rows();
  const Eigen::Index cols = design.cols();
  out.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) acc += design(i, j) * residual(i);
    out(j) = acc;
  }
}

void transposed_product_omp(const Eigen::MatrixXd& design, const Eigen::VectorXd& residual, Eigen::VectorXd& out) {
  const Eigen::Index rows = design.rows();
  const Eigen::Index cols = design.cols();
  out.resize(cols);
  // Same summation order per column as the serial kernel.
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) acc += design(i, j) * residual(i);
    out(j) = acc;
  }
}

void transposed_product(Backend backend, const Eigen::MatrixXd& design, const Eigen::VectorXd& residual,
                        Eigen::VectorXd& out) {
  if (backend == Backend::OpenMP)
    transposed_product_omp(design, residual, out);
  else
    transposed_product_serial(design, residual, out);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace efmcg::kernels
