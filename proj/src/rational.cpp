#include "efmcg/rational.hpp"

#include <cctype>
#include <cmath>
#include <utility>

namespace efmcg {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

std::optional<Rational> parse_decimal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view exp_part = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) return std::nullopt;
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;
  if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;

  std::string digits = std::string(int_part) + std::string(frac_part);
  Integer numerator(digits.empty() ? std::string("0") : digits, 10);
  long scale = static_cast<long>(frac_part.size()) - exponent;
  Rational q;
  if (scale >= 0) {
    q = Rational(numerator, pow10(static_cast<unsigned long>(scale)));
  } else {
    q = Rational(numerator * pow10(static_cast<unsigned long>(-scale)));
  }
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    Integer d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    Rational q(Integer(std::string(num), 10), d);
    q.canonicalize();
    if (negative) q = -q;
    return q;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Eigen::MatrixXd RationalMatrix::to_double() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).get_d();
  return m;
}

RationalMatrix RationalMatrix::select_columns(std::span<const std::size_t> columns) const {
  RationalMatrix out(rows_, columns.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < columns.size(); ++k) out(r, k) = (*this)(r, columns[k]);
  return out;
}

std::size_t exact_rank(RationalMatrix m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rows;
    for (std::size_t r = rank; r < rows; ++r) {
      if (sgn(m(r, c)) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows) continue;
    if (pivot != rank)
      for (std::size_t k = c; k < cols; ++k) std::swap(m(pivot, k), m(rank, k));
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (sgn(m(r, c)) == 0) continue;
      Rational factor = m(r, c) / m(rank, c);
      for (std::size_t k = c; k < cols; ++k) m(r, k) -= factor * m(rank, k);
    }
    ++rank;
  }
  return rank;
}

std::optional<Rational> recognize_rational(double x, long max_denominator, double rel_tol) {
  if (!std::isfinite(x)) return std::nullopt;
  // Continued-fraction convergents of |x|.
  const double ax = std::abs(x);
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double frac = ax;
  for (int step = 0; step < 40; ++step) {
    const double a = std::floor(frac);
    if (a > 1e12) break;
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0;
    const long k2 = ai * k1 + k0;
    if (k2 > max_denominator) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(approx - ax) <= rel_tol * ax) {
      Rational q(h1, k1);
      q.canonicalize();
      return x < 0 ? Rational(-q) : q;
    }
    const double rem = frac - a;
    if (rem <= 0) break;
    frac = 1.0 / rem;
  }
  return std::nullopt;
}

}  // namespace efmcg
