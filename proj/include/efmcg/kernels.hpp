#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP version that must produce identical results; tests compare the two
// and bench/ times them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace efmcg::kernels {

enum class Backend { Serial, OpenMP };

// Fixed-width bit sets, one per ray, stored contiguously. Bit j set means
// coordinate j of the ray is zero.
class ZeroSetTable {
 public:
  explicit ZeroSetTable(std::size_t bits) : bits_(bits), words_((bits + 63) / 64) {}

  std::size_t bits() const noexcept { return bits_; }
  std::size_t words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_ == 0 ? count_ : data_.size() / words_; }

  void clear() {
    data_.clear();
    count_ = 0;
  }
  // Appends an empty set and returns its index.
  std::size_t add();
  void set(std::size_t ray, std::size_t bit) { data_[ray * words_ + bit / 64] |= std::uint64_t{1} << (bit % 64); }
  bool test(std::size_t ray, std::size_t bit) const {
    return (data_[ray * words_ + bit / 64] >> (bit % 64)) & 1u;
  }
  const std::uint64_t* row(std::size_t ray) const { return data_.data() + ray * words_; }
  std::size_t count(std::size_t ray) const;

 private:
  std::size_t bits_;
  std::size_t words_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> data_;
};

using RayPair = std::pair<std::size_t, std::size_t>;

// Combinatorial adjacency test of the double description method: (p, n) is
// adjacent iff their common zero set has at least min_common elements and
// is contained in no other ray's zero set. Output is ordered by position in
// `positive`, then position in `negative`.
std::vector<RayPair> adjacent_pairs_serial(const ZeroSetTable& zeros, std::span<const std::size_t> positive,
                                           std::span<const std::size_t> negative, std::size_t min_common);
std::vector<RayPair> adjacent_pairs_omp(const ZeroSetTable& zeros, std::span<const std::size_t> positive,
                                        std::span<const std::size_t> negative, std::size_t min_common);
std::vector<RayPair> adjacent_pairs(Backend backend, const ZeroSetTable& zeros, std::span<const std::size_t> positive,
                                    std::span<const std::size_t> negative, std::size_t min_common);

// out = design^T * residual, column by column.
void transposed_product_serial(const Eigen::MatrixXd& design, const Eigen::VectorXd& residual, Eigen::VectorXd& out);
void transposed_product_omp(const Eigen::MatrixXd& design, const Eigen::VectorXd& residual, Eigen::VectorXd& out);
void transposed_product(Backend backend, const Eigen::MatrixXd& design, const Eigen::VectorXd& residual,
                        Eigen::VectorXd& out);

// Worker count OpenMP would use; 1 when built without OpenMP.
int max_threads();

}  // namespace efmcg::kernels
