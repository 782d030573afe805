#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace efmcg {

using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "3", "-0.25", "1.5e-3", "2/3". Returns nullopt for anything else.
std::optional<Rational> parse_rational(std::string_view text);

// Shortest exact text: "2", "-1/3".
std::string to_string(const Rational& q);

// Dense row-major matrix of exact rationals. Only what the network and
// rank code needs; not a general linear algebra type.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Eigen::MatrixXd to_double() const;

  // Submatrix keeping all rows and the given columns, in order.
  RationalMatrix select_columns(std::span<const std::size_t> columns) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

// Exact rank by Gaussian elimination over the rationals.
std::size_t exact_rank(RationalMatrix m);

// Largest-denominator-bounded rational within rel_tol of x, if any.
std::optional<Rational> recognize_rational(double x, long max_denominator, double rel_tol);

}  // namespace efmcg
