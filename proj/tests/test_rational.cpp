/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <random>

#include "covprop/errors.hpp"
#include "covprop/rational.hpp"
#include "doctest.h"

using namespace covprop;

TEST_CASE("parse and print rationals") {
  CHECK(parse_rational("3/6") == make_rational(1, 2));
  CHECK(parse_rational(" -4/3 ") == make_rational(-4, 3));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(to_string(Rational(0)) == "0/1");
  CHECK(to_string(Rational(3)) == "3/1");
  CHECK(to_string(make_rational(-2, 4)) == "-1/2");
  for (const char* bad : {"", "1/0", "0.5", "1/-2", "a/b", "1//2", "1e3"}) {
    CHECK_THROWS_AS(parse_rational(bad), ParseError);
  }
}

TEST_CASE("capping at sqrt2/2 decides by squaring") {
  CHECK(ExactReal::capped(make_rational(7, 10)).is_rational());  // 49/100 < 1/2
  CHECK(ExactReal::capped(make_rational(71, 100)).is_half_sqrt2());
  CHECK(ExactReal::capped(Rational(0)).str() == "0/1");
  CHECK(ExactReal::half_sqrt2().str() == "sqrt2/2");
}

TEST_CASE("exact comparison with the sqrt2/2 symbol") {
  const auto h = ExactReal::half_sqrt2();
  CHECK(ExactReal(make_rational(7, 10)) < h);
  CHECK(h < ExactReal(make_rational(71, 100)));
  CHECK(h + h > ExactReal(make_rational(141, 100)));
  CHECK(h + h < ExactReal(make_rational(142, 100)));
  CHECK((h - h).sign() == 0);
  CHECK(h + ExactReal(make_rational(1, 2)) > h);
  CHECK(ExactReal(make_rational(1, 2), Rational(1)).str() != "");
}

TEST_CASE("ExactReal order agrees with a double shadow on random values") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> u(-40, 40);
  const double s = 0.70710678118654752;
  for (int i = 0; i < 500; ++i) {
    const Rational a(u(rng), 8), b(u(rng), 4), c(u(rng), 8), d(u(rng), 4);
    const ExactReal x(a, b), y(c, d);
    const double dx = a.get_d() + b.get_d() * s;
    const double dy = c.get_d() + d.get_d() * s;
    if (dx + 1e-9 < dy) CHECK(x < y);
    if (dy + 1e-9 < dx) CHECK(y < x);
  }
}

TEST_CASE("matrix product and left multiply") {
  RationalMatrix a(2, 2);
  a(0, 0) = make_rational(1, 2);
  a(0, 1) = make_rational(1, 2);
  a(1, 1) = 1;
  const auto id = RationalMatrix::identity(2);
  CHECK(a * id == a);
  const auto row = left_multiply({Rational(1), Rational(0)}, a);
  CHECK(row[0] == make_rational(1, 2));
  CHECK(row[1] == make_rational(1, 2));
}
