#include <catch2/catch_amalgamated.hpp>

#include "multlab/dynamics.hpp"
#include "test_util.hpp"

using namespace multlab;

namespace {

DifferentialSystem exp_system() {
    return DifferentialSystem(1, {parse_affine("1", 1), parse_affine("X1", 1)},
                              {FieldScalar::rational(1)});
}

DifferentialSystem sincos_system() {
    return DifferentialSystem(2, {parse_affine("1", 2), parse_affine("X2", 2), parse_affine("-X1", 2)},
                              {FieldScalar::rational(0), FieldScalar::rational(1)});
}

DifferentialSystem airy_like_system() {
    // f1' = f2, f2' = z f1
    return DifferentialSystem(2, {parse_affine("1", 2), parse_affine("X2", 2), parse_affine("z*X1", 2)},
                              {FieldScalar::rational(1), FieldScalar::rational(0)});
}

MahlerSystem cantor_system() {
    Field Q = Field::rationals();
    return MahlerSystem(1, parse_upoly("z^2"), UPoly::constant(FieldScalar::one(Q)),
                        {parse_affine("1", 1), parse_affine("X1 - z", 1)}, {FieldScalar::zero(Q)});
}

}  // namespace

TEST_CASE("derivation of f'=f reads off the homogenized operator") {
    auto D = MapSpec::derivation(exp_system());
    REQUIRE(D.derivation_shift() == std::make_pair(0, 0));

    auto x1 = parse_bipoly("X1", 1);
    REQUIRE(D.apply(x1) == x1);

    // D(X1') = hA0; its dehomogenization is the affine A0 = 1
    auto dx1p = D.apply(parse_bipoly("X1'", 1));
    REQUIRE(dx1p == parse_bipoly("X0'", 1));
    REQUIRE(dehomogenize(dx1p) == parse_affine("1", 1));
}

TEST_CASE("Cantor pullback substitutes the morphism") {
    auto T = MapSpec::pullback_from_system(cantor_system());
    REQUIRE(T.apply(parse_bipoly("X1", 1)) == parse_bipoly("X1*X0' - X1'*X0", 1));
    REQUIRE(T.apply(parse_bipoly("X0", 1)) == parse_bipoly("X0*X0'", 1));
    REQUIRE(T.apply(parse_bipoly("X1'", 1)) == parse_bipoly("X1'^2", 1));

    auto g = T.growth();
    REQUIRE(g.mu == 1);
    REQUIRE(g.nu0 == 2);
    REQUIRE(g.nu1 == 1);
    REQUIRE(g.lambda == 2);
}

TEST_CASE("degree-1 pullback acts as the identity") {
    Field Q = Field::rationals();
    auto T = MapSpec::mahler_pullback(
        {parse_bipoly("X0'", 1), parse_bipoly("X1'", 1)},
        {parse_bipoly("X0", 1), parse_bipoly("X1", 1)});
    testutil::Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        auto q = rng.bihom_poly(1, Q, rng.below(3), rng.below(3));
        REQUIRE(T.apply(q) == q);
    }
    auto g = T.structural_growth(std::nullopt);
    REQUIRE(g.mu == 1);
    REQUIRE(g.nu0 == 1);
    REQUIRE(g.nu1 == 0);
}

TEST_CASE("bi-homogenization commutes with the derivation action") {
    testutil::Rng rng(20250203);
    for (const auto& sys : {exp_system(), sincos_system(), airy_like_system()}) {
        auto D = MapSpec::derivation(sys);
        for (int trial = 0; trial < 100; ++trial) {
            auto p = rng.affine_poly(sys.n(), Field::rationals());
            auto lhs = D.apply(bihomogenize(p));
            auto rhs = bihomogenize(D.apply_affine(p));
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("derivation output is bi-homogeneous with the exact shift") {
    auto D = MapSpec::derivation(airy_like_system());
    REQUIRE(D.derivation_shift() == std::make_pair(1, 0));
    testutil::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        int a = rng.below(3), b = 1 + rng.below(3);
        auto q = rng.bihom_poly(2, Field::rationals(), a, b);
        auto dq = D.apply(q);
        REQUIRE(dq.is_bihomogeneous());
        if (!dq.is_zero()) REQUIRE(dq.bidegree() == std::make_pair(a + 1, b));
    }
}

TEST_CASE("iterated application composes") {
    auto T = MapSpec::pullback_from_system(cantor_system());
    auto q = parse_bipoly("X1*X0' - X1'*X0", 1);
    REQUIRE(apply_map(T, q, 2) == T.apply(T.apply(q)));
    REQUIRE(apply_map(T, q, 0) == q);
}

TEST_CASE("growth report for the Cantor pullback") {
    auto S = cantor_system();
    auto T = MapSpec::pullback_from_system(S);
    auto F = solve_mahler(S, 64);
    auto rep = growth_report(T, F, 100, 5, 20240301);

    REQUIRE(rep.structural.mu == 1);
    REQUIRE(rep.structural.nu0 == 2);
    REQUIRE(rep.structural.nu1 == 1);
    REQUIRE(rep.degree_violations == 0);
    REQUIRE(rep.lambda_certified > 0);
    REQUIRE(rep.empirical_lambda.has_value());
    REQUIRE(*rep.empirical_lambda >= 2);
    REQUIRE_FALSE(rep.lambda_flagged);
}

TEST_CASE("growth report for the f'=f derivation") {
    auto sys = exp_system();
    auto D = MapSpec::derivation(sys);
    auto F = solve_differential(sys, 48);
    auto rep = growth_report(D, F, 60, 4, 777);

    // deg_X D(Q) <= deg_X Q and no X' inflation for this system
    REQUIRE(rep.structural.mu == 1);
    REQUIRE(rep.structural.nu1 == 0);
    REQUIRE(rep.additive_shift == std::make_pair(0, 0));
    REQUIRE(rep.degree_violations == 0);
    REQUIRE_FALSE(rep.lambda_flagged);
}

TEST_CASE("map application validates input") {
    auto D = MapSpec::derivation(exp_system());
    REQUIRE_THROWS_AS(D.apply(parse_bipoly("X1 + X2", 2)), ArityMismatch);
    REQUIRE_THROWS_AS(D.apply(parse_bipoly("X1 + X0'", 1)), NotBiHomogeneous);
}
