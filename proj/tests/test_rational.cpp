#include "polybound/rational.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace polybound;

TEST_CASE("rational parsing forms") {
    CHECK(*parse_rational("3") == Rational(3));
    CHECK(*parse_rational("-7") == Rational(-7));
    CHECK(*parse_rational("3/2") == Rational(3, 2));
    CHECK(*parse_rational("6/4") == Rational(3, 2));
    CHECK(*parse_rational("2.5") == Rational(5, 2));
    CHECK(*parse_rational("-0.125") == Rational(-1, 8));
    CHECK(*parse_rational("0.10") == Rational(1, 10));
    CHECK(*parse_rational(".5") == Rational(1, 2));
}

TEST_CASE("rational parsing rejects junk") {
    CHECK_FALSE(parse_rational("").has_value());
    CHECK_FALSE(parse_rational("x").has_value());
    CHECK_FALSE(parse_rational("1/0").has_value());
    CHECK_FALSE(parse_rational("1.2.3").has_value());
    CHECK_FALSE(parse_rational("1e3").has_value());
    CHECK_FALSE(parse_rational("1/").has_value());
}

TEST_CASE("rational canonical text") {
    CHECK(to_string(Rational(3)) == "3");
    CHECK(to_string(Rational(3, 2)) == "3/2");
    CHECK(to_string(Rational(-4, 8)) == "-1/2");
    CHECK(to_string(Rational(0)) == "0");
}

TEST_CASE("extended rationals order and print") {
    ExtRational two(Rational(2)), three(Rational(3));
    ExtRational inf = ExtRational::infinity();
    CHECK(two < three);
    CHECK(three < inf);
    CHECK(inf == ExtRational::infinity());
    CHECK_FALSE(inf < inf);
    CHECK(inf.to_string() == "inf");
    CHECK(ExtRational(Rational(3, 2)).to_string() == "3/2");
    CHECK_THROWS_AS(inf.value(), std::logic_error);
}
