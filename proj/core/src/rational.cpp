/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/rational.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "covprop/errors.hpp"

namespace covprop {
namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);

  const auto slash = s.find('/');
  std::string_view num = slash == std::string_view::npos ? s : s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
    throw ParseError("not a rational literal '" + std::string(text) + "' (expected \"p/q\")");
  }
  if (num[0] == '+') num.remove_prefix(1);
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

std::vector<Rational> sorted_unique(std::vector<Rational> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

ExactReal ExactReal::capped(const Rational& value) {
  if (value * value < Rational(1, 2)) return ExactReal(value);
  return half_sqrt2();
}

int ExactReal::sign() const {
  // value = a + b * s with s = sqrt(2)/2 > 0 irrational.
  const int sa = sgn(rational_);
  const int sb = sgn(coeff_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: compare a^2 with b^2 / 2; they are never equal.
  const Rational a2 = rational_ * rational_;
  const Rational b2 = coeff_ * coeff_ / 2;
  return a2 > b2 ? sa : sb;
}

std::string ExactReal::str() const {
  if (is_rational()) return to_string(rational_);
  if (is_half_sqrt2()) return "sqrt2/2";
  std::string coeff = coeff_ == 1 ? std::string() : to_string(coeff_) + "*";
  if (rational_ == 0) return coeff + "sqrt2/2";
  return to_string(rational_) + " + " + coeff + "sqrt2/2";
}

std::ostream& operator<<(std::ostream& os, const ExactReal& value) { return os << value.str(); }

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::vector<Rational> RationalMatrix::row(std::size_t r) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  RationalMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

std::vector<Rational> left_multiply(const std::vector<Rational>& row, const RationalMatrix& m) {
  std::vector<Rational> out(m.cols(), Rational(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (row[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[i] * m(i, j);
  }
  return out;
}

}  // namespace covprop
