#include <catch2/catch_amalgamated.hpp>

#include "multlab/series.hpp"
#include "test_util.hpp"

using namespace multlab;

namespace {

TruncatedSeries from_ints(const Field& f, const std::vector<long>& cs) {
    std::vector<FieldScalar> v;
    for (long c : cs) v.push_back(FieldScalar::from_rational_mod(f, BigRational(c)));
    return TruncatedSeries(f, std::move(v));
}

// Plain convolution, written independently of mul_series.
TruncatedSeries conv_oracle(const TruncatedSeries& a, const TruncatedSeries& b) {
    std::size_t n = std::min(a.precision(), b.precision());
    TruncatedSeries s(a.field(), n);
    for (std::size_t k = 0; k < n; ++k) {
        FieldScalar acc = FieldScalar::zero(a.field());
        for (std::size_t i = 0; i <= k; ++i) acc += a.coeff(i) * b.coeff(k - i);
        s.coeff(k) = acc;
    }
    return s;
}

}  // namespace

TEST_CASE("product truncates to the minimum precision") {
    Field Q = Field::rationals();
    auto a = from_ints(Q, {1, 1, 0, 0});   // 1+z at N=4
    auto b = from_ints(Q, {1, -1, 0, 0});  // 1-z
    auto p = mul_series(a, b);
    REQUIRE(p == from_ints(Q, {1, 0, -1, 0}));  // 1 - z^2

    auto z2 = TruncatedSeries::monomial(Q, 2, 4);
    auto z3 = TruncatedSeries::monomial(Q, 3, 4);
    auto q = mul_series(z2, z3);
    REQUIRE(q.precision() == 4);
    REQUIRE(ord_series(q) == OrdValue::at_least(4));
}

TEST_CASE("Frobenius square of the Cantor series over F2") {
    Field F2 = Field::prime(2);
    auto c = testutil::cantor_series(F2, 9);  // z + z^2 + z^4 + z^8
    auto sq = mul_series(c, c);
    REQUIRE(sq == from_ints(F2, {0, 0, 1, 0, 1, 0, 0, 0, 1}));  // z^2 + z^4 + z^8
    REQUIRE(sq == conv_oracle(c, c));
}

TEST_CASE("composition basics") {
    Field Q = Field::rationals();
    auto a = from_ints(Q, {1, 1, 1, 0, 0});  // 1 + z + z^2, N=5
    auto g = TruncatedSeries::monomial(Q, 2, 5);
    auto r = compose_series(a, g);
    REQUIRE(r == from_ints(Q, {1, 0, 1, 0, 1}));  // 1 + z^2 + z^4

    // identity outer series returns the inner one
    auto id = TruncatedSeries::identity(Q, 6);
    testutil::Rng rng(777);
    for (int i = 0; i < 10; ++i) {
        auto inner = rng.series(Q, 6);
        inner.coeff(0) = FieldScalar::zero(Q);
        REQUIRE(compose_series(id, inner) == inner);
    }
}

TEST_CASE("composition solves the Cantor functional equation") {
    Field Q = Field::rationals();
    auto c = testutil::cantor_series(Q, 9);
    auto g = TruncatedSeries::monomial(Q, 2, 9);
    auto r = compose_series(c, g);
    REQUIRE(r.precision() == 9);
    // f(z^2) = f(z) - z
    REQUIRE(r == c - TruncatedSeries::identity(Q, 9));
}

TEST_CASE("composition precision rule min(Na*ord(g), Ng)") {
    Field Q = Field::rationals();
    auto a = from_ints(Q, {1, 1, 1});      // N_a = 3
    auto g = TruncatedSeries::monomial(Q, 2, 20);  // ord 2, N_g = 20
    REQUIRE(compose_series(a, g).precision() == 6);

    auto g2 = TruncatedSeries::monomial(Q, 2, 4);
    REQUIRE(compose_series(a, g2).precision() == 4);
}

TEST_CASE("composition demands positive inner valuation") {
    Field Q = Field::rationals();
    auto a = from_ints(Q, {1, 1});
    auto g = from_ints(Q, {1, 1});
    REQUIRE_THROWS_AS(compose_series(a, g), InnerNotPositiveValuation);

    // an all-zero inner series is certified ord >= N, fine
    auto zero = TruncatedSeries(Q, 4);
    REQUIRE(compose_series(a, zero).coeff(0) == FieldScalar::rational(1));
}

TEST_CASE("ord computation") {
    Field Q = Field::rationals();
    REQUIRE(ord_series(from_ints(Q, {0, 0, 1, 1})) == OrdValue::finite(2));
    REQUIRE(ord_series(TruncatedSeries(Q, 16)) == OrdValue::at_least(16));

    auto c = testutil::cantor_series(Q, 16);
    auto tail = c - TruncatedSeries::identity(Q, 16) - TruncatedSeries::monomial(Q, 2, 16);
    REQUIRE(ord_series(tail) == OrdValue::finite(4));
}

TEST_CASE("ultrametric axioms on random pairs") {
    testutil::Rng rng(424242);
    for (const Field& f : {Field::rationals(), Field::prime(5)}) {
        for (int trial = 0; trial < 100; ++trial) {
            auto a = rng.series(f, 12);
            auto b = rng.series(f, 12);
            auto oa = ord_series(a), ob = ord_series(b);
            if (oa.is_finite() && ob.is_finite() && oa.value() + ob.value() < 12) {
                REQUIRE(ord_series(mul_series(a, b)) == OrdValue::finite(oa.value() + ob.value()));
            }
            auto osum = ord_series(a + b);
            REQUIRE(osum.lower_bound() >= std::min(oa.lower_bound(), ob.lower_bound()));
            if (oa.is_finite() && ob.is_finite() && oa.value() != ob.value())
                REQUIRE(osum == OrdValue::finite(std::min(oa.value(), ob.value())));
        }
    }
}

TEST_CASE("multiplication is associative at matched precision") {
    testutil::Rng rng(31415);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = rng.series(Field::rationals(), 10);
        auto b = rng.series(Field::rationals(), 10);
        auto c = rng.series(Field::rationals(), 10);
        REQUIRE(mul_series(mul_series(a, b), c) == mul_series(a, mul_series(b, c)));
    }
}

TEST_CASE("series inversion and derivative") {
    Field Q = Field::rationals();
    auto a = from_ints(Q, {1, -1, 0, 0, 0, 0});  // 1 - z
    auto inv = invert_series(a);                 // geometric series
    for (std::size_t k = 0; k < 6; ++k) REQUIRE(inv.coeff(k) == FieldScalar::rational(1));

    auto d = derive_series(from_ints(Q, {7, 1, 3, 5}));
    REQUIRE(d.precision() == 3);
    REQUIRE(d == from_ints(Q, {1, 6, 15}));
}

TEST_CASE("composition is associative at the matched precision") {
    testutil::Rng rng(2718);
    Field Q = Field::rationals();
    for (int trial = 0; trial < 20; ++trial) {
        auto a = rng.series(Q, 10);
        auto g = rng.series(Q, 10);
        auto h = rng.series(Q, 10);
        g.coeff(0) = FieldScalar::zero(Q);
        h.coeff(0) = FieldScalar::zero(Q);
        if (!ord_series(g).is_finite() || !ord_series(h).is_finite()) continue;
        auto lhs = compose_series(compose_series(a, g), h);
        auto rhs = compose_series(a, compose_series(g, h));
        REQUIRE(lhs.precision() == rhs.precision());
        REQUIRE(lhs == rhs);
    }
}
