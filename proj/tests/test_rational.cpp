#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "reeb/rational.hpp"

using namespace reeb;

TEST_CASE("reduced form and arithmetic") {
  Rat a(2, 4);
  CHECK(a == Rat(1, 2));
  CHECK(a.num_string() == "1");
  CHECK(a.den_string() == "2");
  CHECK((Rat(1, 3) + Rat(1, 6)) == Rat(1, 2));
  CHECK((Rat(1, 2) - Rat(2)) == Rat(-3, 2));
  CHECK((Rat(-4, 6)).str() == "-2/3");
  CHECK(Rat(3).str() == "3");
  CHECK(Rat(7, 2).half() == Rat(7, 4));
  CHECK(Rat(-5, 3).abs() == Rat(5, 3));
}

TEST_CASE("ordering and midpoints") {
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(min(Rat(1), Rat(2)) == Rat(1));
  CHECK(max(Rat(1), Rat(2)) == Rat(2));
  CHECK(mid(Rat(0), Rat(1)) == Rat(1, 2));
  CHECK(mid(Rat(-1, 2), Rat(1, 3)) == Rat(-1, 12));
}

TEST_CASE("closed under halving without rounding") {
  Rat x(1);
  for (int i = 0; i < 12; ++i) x = x.half();
  CHECK(x == Rat(1, 4096));
}

TEST_CASE("interval windows") {
  Interval iv = Interval::around(Rat(1, 2), Rat(3, 2));
  CHECK(iv.lo == Rat(-1));
  CHECK(iv.hi == Rat(2));
  CHECK(iv.contains(Rat(-1)));
  CHECK(iv.contains(Rat(2)));
  CHECK(!iv.contains(Rat(5, 2)));
  CHECK(iv.width() == Rat(3));
  CHECK_THROWS(Interval(Rat(1), Rat(0)));
}

TEST_CASE("int64 JSON encoding") {
  auto [n, d] = Rat(-7, 3).to_int64_pair();
  CHECK(n == -7);
  CHECK(d == 3);
}
