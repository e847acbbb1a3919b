#include <catch2/catch_amalgamated.hpp>

#include "subrc/rational.hpp"

using namespace subrc;

TEST_CASE("rationals stay canonical") {
  Rational q = rat(2, 4);
  CHECK(to_string(q) == "1/2");
  CHECK(to_string(rat(-6, 3)) == "-2");
  CHECK(to_string(rat(3, -6)) == "-1/2");
  CHECK(to_string(rat(0, 7)) == "0");
}

TEST_CASE("parse and render round trip") {
  for (const char* s : {"0", "1", "-1", "1/2", "-3/7", "22/7", "1000000000000000000000/7"}) {
    Rational q = parse_rational(s);
    CHECK(to_string(q) == s);
  }
  CHECK(parse_rational("4/8") == rat(1, 2));
  CHECK_THROWS_AS(parse_rational("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
}

TEST_CASE("arithmetic is exact") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    Rational a = rng.next_rational(1000, 1000);
    Rational b = rng.next_rational(1000, 1000);
    CHECK((a + b) - b == a);
    if (!is_zero(b)) CHECK((a / b) * b == a);
  }
}
