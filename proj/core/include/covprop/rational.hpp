/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace covprop {

/// Exact rational number. Every distance, tolerance and weight in the
/// library is one of these; nothing is ever compared in floating point.
using Rational = mpq_class;

/// num/den in lowest terms. The two-argument mpq_class constructor does not
/// reduce, and GMP arithmetic assumes reduced operands.
Rational make_rational(long num, long den);

/// Parses "p/q", "p" or "-p/q". Throws ParseError on anything else or q = 0.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form, always with an explicit denominator ("0/1", "3/1").
std::string to_string(const Rational& value);

Rational abs(const Rational& value);

/// Sorted, duplicate-free copy.
std::vector<Rational> sorted_unique(std::vector<Rational> values);

/// A number of the form  rational + coeff * sqrt(2)/2  with rational
/// coefficients. Large enough to hold capped distances, their sums, and
/// differences, with exact comparison.
class ExactReal {
 public:
  ExactReal() = default;
  ExactReal(Rational rational) : rational_(std::move(rational)) {}  // NOLINT
  ExactReal(Rational rational, Rational half_sqrt2_coeff)
      : rational_(std::move(rational)), coeff_(std::move(half_sqrt2_coeff)) {
    rational_.canonicalize();
    coeff_.canonicalize();
  }

  /// The constant sqrt(2)/2.
  static ExactReal half_sqrt2() { return ExactReal(Rational(0), Rational(1)); }

  /// min(sqrt(2)/2, value) for value >= 0. Since sqrt(2)/2 is irrational
  /// the comparison is value^2 < 1/2.
  static ExactReal capped(const Rational& value);

  bool is_rational() const { return coeff_ == 0; }
  bool is_half_sqrt2() const { return rational_ == 0 && coeff_ == 1; }
  const Rational& rational_part() const { return rational_; }
  const Rational& half_sqrt2_coeff() const { return coeff_; }

  /// Sign of the exact value: -1, 0, or 1.
  int sign() const;

  friend ExactReal operator+(const ExactReal& a, const ExactReal& b) {
    return ExactReal(a.rational_ + b.rational_, a.coeff_ + b.coeff_);
  }
  friend ExactReal operator-(const ExactReal& a, const ExactReal& b) {
    return ExactReal(a.rational_ - b.rational_, a.coeff_ - b.coeff_);
  }
  friend bool operator==(const ExactReal& a, const ExactReal& b) {
    return a.rational_ == b.rational_ && a.coeff_ == b.coeff_;
  }
  friend bool operator<(const ExactReal& a, const ExactReal& b) { return (b - a).sign() > 0; }
  friend bool operator<=(const ExactReal& a, const ExactReal& b) { return (b - a).sign() >= 0; }
  friend bool operator>(const ExactReal& a, const ExactReal& b) { return b < a; }
  friend bool operator>=(const ExactReal& a, const ExactReal& b) { return b <= a; }

  /// "p/q", "sqrt2/2", or "p/q + c*sqrt2/2" for general sums.
  std::string str() const;

 private:
  Rational rational_{0};
  Rational coeff_{0};
};

std::ostream& operator<<(std::ostream& os, const ExactReal& value);

/// Dense row-major matrix of rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols, const Rational& fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<Rational> row(std::size_t r) const;

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Row vector times matrix.
std::vector<Rational> left_multiply(const std::vector<Rational>& row, const RationalMatrix& m);

}  // namespace covprop
