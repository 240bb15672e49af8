#include <catch2/catch_amalgamated.hpp>

#include "multlab/ideals.hpp"
#include "test_util.hpp"

using namespace multlab;

namespace {

MahlerSystem cantor_system() {
    Field Q = Field::rationals();
    return MahlerSystem(1, parse_upoly("z^2"), UPoly::constant(FieldScalar::one(Q)),
                        {parse_affine("1", 1), parse_affine("X1 - z", 1)}, {FieldScalar::zero(Q)});
}

}  // namespace

TEST_CASE("monomial multiples of a generator are members") {
    GeneratedIdeal I({parse_bipoly("X1*X0' - X1'*X0", 1)});
    auto g = I.generators()[0];
    auto P = parse_bipoly("X1", 1) * g;
    auto cert = slice_membership(I, P);
    REQUIRE(cert.member);
    REQUIRE(cert.recombine(I) == P);
}

TEST_CASE("a one-dimensional slice rejects the orthogonal direction") {
    GeneratedIdeal I({parse_bipoly("X0 - X1", 1)});
    REQUIRE_FALSE(slice_membership(I, parse_bipoly("X0 + X1", 1)).member);
    REQUIRE(slice_membership(I, parse_bipoly("X0 - X1", 1)).member);
}

TEST_CASE("explicit multiple found with its certificate") {
    GeneratedIdeal I({parse_bipoly("X1*X0' - X1'*X0", 1)});
    auto P = parse_bipoly("X1*X0'*X0 - X1'*X0^2", 1);
    auto cert = slice_membership(I, P);
    REQUIRE(cert.member);
    REQUIRE(cert.combination.size() == 1);
    // multiplier is the monomial X0
    std::vector<int> x0_key = {0, 0, 1, 0};
    REQUIRE(std::get<1>(cert.combination[0]) == x0_key);
    REQUIRE(std::get<2>(cert.combination[0]) == FieldScalar::rational(1));
    REQUIRE(cert.recombine(I) == P);
}

TEST_CASE("certificates recombine exactly on random members") {
    testutil::Rng rng(2468);
    GeneratedIdeal I({parse_bipoly("X1*X0' - X1'*X0", 1), parse_bipoly("X0^2 + X1^2", 1)});
    for (int trial = 0; trial < 20; ++trial) {
        // random element of the ideal: m1*g1 + m2*g2
        auto m1 = rng.bihom_poly(1, Field::rationals(), 1, 1);
        auto m2 = rng.bihom_poly(1, Field::rationals(), 2, 0);
        auto P = m1 * I.generators()[0] + m2 * I.generators()[1];
        if (P.is_zero()) continue;
        auto cert = slice_membership(I, P);
        REQUIRE(cert.member);
        REQUIRE(cert.recombine(I) == P);
    }
}

TEST_CASE("mismatched input raises typed errors") {
    GeneratedIdeal I({parse_bipoly("X1", 1)});
    REQUIRE_THROWS_AS(slice_membership(I, parse_bipoly("X1 + X0^2", 1)), NotBiHomogeneous);
    REQUIRE_THROWS_AS(slice_membership(I, parse_bipoly("X1", 2)), ArityMismatch);
    REQUIRE_THROWS_AS(GeneratedIdeal({parse_bipoly("X1 + X0^2", 1)}), NotBiHomogeneous);
}

TEST_CASE("ideal <X1> is stable under D when A1 = 0") {
    Field Q = Field::rationals();
    DifferentialSystem sys(1, {parse_affine("1", 1), AffinePolynomial(1, Q)},
                           {FieldScalar::rational(1)});
    auto D = MapSpec::derivation(sys);
    REQUIRE(D.apply(parse_bipoly("X1", 1)).is_zero());
    auto rep = is_phi_stable(GeneratedIdeal({parse_bipoly("X1", 1)}), D);
    REQUIRE(rep.stable);
}

TEST_CASE("Cantor pullback stability: <X1'> stable, <X0 - X1> not") {
    auto T = MapSpec::pullback_from_system(cantor_system());

    auto rep1 = is_phi_stable(GeneratedIdeal({parse_bipoly("X1'", 1)}), T);
    REQUIRE(rep1.stable);

    auto rep2 = is_phi_stable(GeneratedIdeal({parse_bipoly("X0 - X1", 1)}), T);
    REQUIRE_FALSE(rep2.stable);
    REQUIRE(rep2.violating_generator == 0);
    // phi(X0 - X1) = X0'(X0 - X1) + X1'X0
    auto expected = parse_bipoly("X0'*X0 - X0'*X1 + X1'*X0", 1);
    REQUIRE(*rep2.violating_image == expected);
}

TEST_CASE("observed vanishing slice of an algebraic point") {
    Field Q = Field::rationals();
    FunctionalPoint F({TruncatedSeries::identity(Q, 32)});  // f1 = z
    auto slice = pf_slice(F, 1, 1, 32);
    REQUIRE(slice.basis.size() == 1);
    REQUIRE(slice.basis[0] == parse_bipoly("X0'*X1 - X1'*X0", 1));
    REQUIRE(slice.stabilized);
}

TEST_CASE("Cantor point has trivial (1,1) slice") {
    auto F = solve_mahler(cantor_system(), 32);
    auto slice = pf_slice(F, 1, 1, 32);
    REQUIRE(slice.basis.empty());
    REQUIRE(slice.stabilized);
    REQUIRE(slice.kernel_dims.back() == 0);
}

TEST_CASE("duplicated coordinates expose the linear relation") {
    Field Q = Field::rationals();
    auto f = testutil::cantor_series(Q, 24);
    FunctionalPoint F({f, f});
    auto slice = pf_slice(F, 0, 1, 24);
    bool found = false;
    for (const auto& p : slice.basis)
        if (p == parse_bipoly("X2 - X1", 2) || p == parse_bipoly("X1 - X2", 2)) found = true;
    REQUIRE(found);
}

TEST_CASE("slice dimensions are monotone") {
    auto F = solve_mahler(cantor_system(), 48);

    // nonincreasing in N at fixed (a,b)
    std::size_t prev = SIZE_MAX;
    for (std::size_t N : {8u, 16u, 32u, 48u}) {
        auto s = pf_slice(F, 1, 1, N);
        REQUIRE(s.basis.size() <= prev);
        prev = s.basis.size();
    }

    // nondecreasing in (a,b) at fixed N: multiply relations by X0' or X0
    Field Q = Field::rationals();
    FunctionalPoint G({TruncatedSeries::identity(Q, 32)});
    auto s11 = pf_slice(G, 1, 1, 32);
    auto s21 = pf_slice(G, 2, 1, 32);
    auto s12 = pf_slice(G, 1, 2, 32);
    REQUIRE(s21.basis.size() >= s11.basis.size());
    REQUIRE(s12.basis.size() >= s11.basis.size());
}

TEST_CASE("stability of the generator images is reflexive on the corpus") {
    auto T = MapSpec::pullback_from_system(cantor_system());
    std::vector<GeneratedIdeal> stable_ideals = {
        GeneratedIdeal({parse_bipoly("X1'", 1)}),
        GeneratedIdeal({parse_bipoly("X0'", 1)}),
        GeneratedIdeal({parse_bipoly("X0", 1)}),
    };
    for (const auto& I : stable_ideals) {
        auto rep = is_phi_stable(I, T);
        REQUIRE(rep.stable);
        for (const auto& g : I.generators()) {
            auto img = T.apply(g);
            if (!img.is_zero()) REQUIRE(slice_membership(I, img).member);
        }
    }
}

TEST_CASE("pf_slice needs enough precision") {
    Field Q = Field::rationals();
    FunctionalPoint F({TruncatedSeries::identity(Q, 8)});
    REQUIRE_THROWS_AS(pf_slice(F, 1, 1, 16), PrecisionExhausted);
}
