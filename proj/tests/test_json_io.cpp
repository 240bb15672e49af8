#include <catch2/catch_amalgamated.hpp>

#include "multlab/json_io.hpp"
#include "test_util.hpp"

using namespace multlab;
using multlab::json;

TEST_CASE("system descriptors round through JSON") {
    json j = {{"kind", "mahler"}, {"n", 1},          {"p", "z^2"}, {"A", {"1", "X1 - z"}},
              {"seed", {"0"}},    {"char", 0},       {"tf", 1}};
    auto cfg = io::system_from_json(j);
    REQUIRE(cfg.is_mahler());
    REQUIRE(cfg.tf == 1u);
    auto F = io::solve_system(cfg, 17);
    REQUIRE(F.declared_tf() == 1u);
    REQUIRE(F.f(1) == testutil::cantor_series(Field::rationals(), 17));
    for (const auto& o : io::verify_system(cfg, F, 17)) REQUIRE(o == OrdValue::at_least(17));
}

TEST_CASE("differential descriptor with numeric seeds and F_p fields") {
    json j = {{"kind", "differential"}, {"n", 1}, {"A", {"1", "X1"}}, {"seed", {1}}, {"char", 5}};
    auto cfg = io::system_from_json(j);
    REQUIRE_FALSE(cfg.is_mahler());
    REQUIRE(cfg.field().characteristic() == 5);
    auto F = io::solve_system(cfg, 5);
    REQUIRE(F.f(1).coeff(2).residue_value() == 3);  // 1/2 = 3 mod 5
}

TEST_CASE("bad descriptors are config errors") {
    REQUIRE_THROWS_AS(io::system_from_json(json{{"kind", "mahler"}}), ConfigError);
    REQUIRE_THROWS_AS(io::system_from_json(json{{"kind", "nope"},
                                                {"n", 1},
                                                {"A", {"1", "X1"}},
                                                {"seed", {"0"}}}),
                      ConfigError);
    json wrong_arity = {{"kind", "differential"}, {"n", 2}, {"A", {"1", "X1"}}, {"seed", {"0", "0"}}};
    REQUIRE_THROWS_AS(io::system_from_json(wrong_arity), ConfigError);
}

TEST_CASE("map descriptors: explicit pullback, derivation, from-system") {
    json pull = {{"kind", "mahler"},
                 {"n", 1},
                 {"Aprime", {"X0'^2", "X1'^2"}},
                 {"A", {"X0*X0'", "X1*X0' - X1'*X0"}},
                 {"growth", {{"mu", 1}, {"nu0", 2}, {"nu1", 1}, {"lambda", "2"}, {"Klambda", 0}}}};
    auto T = io::mapspec_from_json(pull);
    REQUIRE(T.kind() == MapSpec::Kind::MahlerPullback);
    REQUIRE(T.growth().lambda == 2);

    json deriv = {{"kind", "derivation"}, {"n", 1}, {"A", {"1", "X1"}}};
    auto D = io::mapspec_from_json(deriv);
    REQUIRE(D.kind() == MapSpec::Kind::Derivation);
    REQUIRE(D.apply(parse_bipoly("X1", 1)) == parse_bipoly("X1", 1));

    json from_sys = {{"kind", "mahler"},
                     {"system",
                      {{"kind", "mahler"}, {"n", 1}, {"p", "z^2"}, {"A", {"1", "X1 - z"}},
                       {"seed", {"0"}}}}};
    auto T2 = io::mapspec_from_json(from_sys);
    REQUIRE(T2.apply(parse_bipoly("X1", 1)) == parse_bipoly("X1*X0' - X1'*X0", 1));
}

TEST_CASE("cycles parse both plain and bi-projective points") {
    json j = {{"points", {json::array({"1", "z^2+1"}),
                          {{"prime", {"1", "z"}}, {"coords", {"1", "z"}}}}},
              {"mult", {1, 2}}};
    auto cyc = io::cycle_from_json(j);
    REQUIRE(cyc.degree() == 3);
    REQUIRE(cyc.points()[0].height() == 2);
    REQUIRE(cyc.points()[1].has_prime());
}

TEST_CASE("series and scan render with exact scalar strings") {
    Field F7 = Field::prime(7);
    TruncatedSeries s(F7, {FieldScalar::residue(F7, 4), FieldScalar::residue(F7, 0)});
    json j = io::series_to_json(s);
    REQUIRE(j["precision"] == 2);
    REQUIRE(j["coeffs"][0] == "4 mod 7");
    REQUIRE(j["field"]["char"] == 7);

    TruncatedSeries q(Field::rationals(), {FieldScalar::rational(3, 2)});
    REQUIRE(io::series_to_json(q)["coeffs"][0] == "3/2");
}

TEST_CASE("ideal descriptor") {
    json j = {{"n", 1}, {"generators", {"X0 - X1"}}};
    auto I = io::ideal_from_json(j);
    REQUIRE(I.generators().size() == 1);
    REQUIRE_THROWS_AS(io::ideal_from_json(json{{"n", 1}, {"generators", {"X0 + X1^2"}}}),
                      NotBiHomogeneous);
}
