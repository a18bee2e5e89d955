#include <doctest.h>

#include "finitemix/error.hpp"
#include "finitemix/rational.hpp"

using namespace finitemix;

TEST_CASE("make_rational normalizes sign and gcd") {
    CHECK(make_rational(2, 4) == Rational{1, 2});
    CHECK(make_rational(-2, 4) == Rational{-1, 2});
    CHECK(make_rational(2, -4) == Rational{-1, 2});
    CHECK(make_rational(-2, -4) == Rational{1, 2});
    CHECK(make_rational(0, 7) == Rational{0, 1});
    CHECK(make_rational(6, 3) == Rational{2, 1});
    CHECK(make_rational(49, 7) == Rational{7, 1});
}

TEST_CASE("make_rational rejects zero denominator") {
    CHECK_THROWS_WITH_AS(make_rational(1, 0), "BadRational: zero denominator", Error);
}

TEST_CASE("to_string always carries the slash") {
    CHECK(to_string(make_rational(1, 2)) == "1/2");
    CHECK(to_string(make_rational(3, 1)) == "3/1");
    CHECK(to_string(make_rational(0, 5)) == "0/1");
    CHECK(to_string(make_rational(-3, 7)) == "-3/7");
}

TEST_CASE("parse_rational round-trips canonical strings") {
    for (std::int64_t num = -12; num <= 12; ++num) {
        for (std::int64_t den = 1; den <= 12; ++den) {
            const Rational r = make_rational(num, den);
            CHECK(parse_rational(to_string(r)) == r);
        }
    }
}

TEST_CASE("parse_rational accepts bare integers and normalizes") {
    CHECK(parse_rational("3") == Rational{3, 1});
    CHECK(parse_rational("-4/8") == Rational{-1, 2});
    CHECK(parse_rational("6/4") == Rational{3, 2});
}

TEST_CASE("parse_rational rejects malformed text") {
    for (const char* bad : {"", "/", "1/", "/2", "a/2", "1/b", "1.5", "1/2/3", " 1/2"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_rational(bad), Error);
    }
}

TEST_CASE("to_double matches the exact quotient") {
    CHECK(to_double(make_rational(1, 2)) == 0.5);
    CHECK(to_double(make_rational(3, 4)) == 0.75);
    CHECK(to_double(make_rational(1, 3)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}
