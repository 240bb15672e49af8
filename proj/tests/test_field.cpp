#include <catch2/catch_amalgamated.hpp>

#include "multlab/field.hpp"
#include "test_util.hpp"

using namespace multlab;

TEST_CASE("rational scalars stay in lowest terms with positive denominator") {
    FieldScalar a = FieldScalar::rational(6, -4);
    REQUIRE(boost::multiprecision::numerator(a.rational_value()) == -3);
    REQUIRE(boost::multiprecision::denominator(a.rational_value()) == 2);

    FieldScalar b = FieldScalar::rational(1, 3);
    REQUIRE((a * b).to_string() == "-1/2");
    REQUIRE((a + b).to_string() == "-7/6");
}

TEST_CASE("prime field arithmetic") {
    Field f7 = Field::prime(7);
    FieldScalar a = FieldScalar::residue(f7, 4);
    FieldScalar b = FieldScalar::residue(f7, 5);
    REQUIRE((a + b).residue_value() == 2);
    REQUIRE((a * b).residue_value() == 6);
    REQUIRE((a / b).residue_value() == 5);  // 4 * 5^{-1} = 4 * 3 = 12 = 5
    REQUIRE((-a).residue_value() == 3);
    REQUIRE(a.to_string() == "4 mod 7");
}

TEST_CASE("field construction rejects composite characteristic") {
    REQUIRE_THROWS_AS(Field::prime(6), ConfigError);
    REQUIRE_THROWS_AS(Field::prime(1), ConfigError);
    REQUIRE_NOTHROW(Field::prime(2));
    REQUIRE_NOTHROW(Field::prime(101));
}

TEST_CASE("mixed-field arithmetic is an error, not a coercion") {
    FieldScalar q = FieldScalar::rational(1, 2);
    FieldScalar r = FieldScalar::residue(Field::prime(5), 3);
    REQUIRE_THROWS_AS(q + r, FieldMismatch);
    REQUIRE_THROWS_AS(q * r, FieldMismatch);
    REQUIRE_THROWS_AS(q == r, FieldMismatch);
}

TEST_CASE("rational reduction mod p") {
    Field f5 = Field::prime(5);
    REQUIRE(FieldScalar::from_rational_mod(f5, BigRational(1, 2)).residue_value() == 3);
    REQUIRE(FieldScalar::from_rational_mod(f5, BigRational(-1)).residue_value() == 4);
    REQUIRE_THROWS_AS(FieldScalar::from_rational_mod(f5, BigRational(1, 5)), FieldMismatch);
}

TEST_CASE("scalar parse/print round trip") {
    Field f7 = Field::prime(7);
    REQUIRE(parse_scalar(Field::rationals(), "3/2").to_string() == "3/2");
    REQUIRE(parse_scalar(Field::rationals(), "-4").to_string() == "-4");
    REQUIRE(parse_scalar(f7, "4 mod 7").to_string() == "4 mod 7");
    REQUIRE(parse_scalar(f7, "10").to_string() == "3 mod 7");
    REQUIRE_THROWS_AS(parse_scalar(Field::rationals(), "4 mod 7"), FieldMismatch);
}

TEST_CASE("exactness: (a/b)*(b/a) = 1 for random nonzero scalars") {
    testutil::Rng rng(20240811);
    for (int i = 0; i < 200; ++i) {
        FieldScalar a = rng.nonzero_scalar(Field::rationals(), 1000);
        FieldScalar b = rng.nonzero_scalar(Field::rationals(), 1000);
        REQUIRE((a / b) * (b / a) == FieldScalar::rational(1));
    }
    Field f5 = Field::prime(5);
    for (int i = 0; i < 50; ++i) {
        FieldScalar a = rng.nonzero_scalar(f5);
        FieldScalar b = rng.nonzero_scalar(f5);
        REQUIRE((a / b) * (b / a) == FieldScalar::one(f5));
    }
}
