// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code 0 iff everything passed.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "multlab/bounds.hpp"
#include "multlab/estimates.hpp"
#include "multlab/geometry.hpp"
#include "test_util.hpp"

using namespace multlab;

namespace {

int failures = 0;

void criterion(int number, const std::string& label, double budget_seconds,
               const std::function<void()>& body) {
    auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
        body();
    } catch (const std::exception& e) {
        error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (error.empty() && budget_seconds > 0 && secs > budget_seconds) {
        std::ostringstream os;
        os << "exceeded the " << budget_seconds << " s budget (" << secs << " s)";
        error = os.str();
    }
    if (error.empty()) {
        std::printf("PASS criterion %2d: %s (%.2f s)\n", number, label.c_str(), secs);
    } else {
        std::printf("FAIL criterion %2d: %s (%.2f s): %s\n", number, label.c_str(), secs,
                    error.c_str());
        ++failures;
    }
    std::fflush(stdout);
}

void check(bool cond, const std::string& message) {
    if (!cond) throw std::runtime_error(message);
}

MahlerSystem cantor_system(const Field& f) {
    return MahlerSystem(1, parse_upoly("z^2", f), UPoly::constant(FieldScalar::one(f)),
                        {parse_affine("1", 1, f), parse_affine("X1 - z", 1, f)},
                        {FieldScalar::zero(f)});
}

MahlerSystem thue_morse_system() {
    Field Q = Field::rationals();
    return MahlerSystem(1, parse_upoly("z^2"), UPoly::constant(FieldScalar::one(Q)),
                        {parse_affine("1 - z", 1), parse_affine("X1", 1)},
                        {FieldScalar::rational(1)});
}

DifferentialSystem exp_system() {
    return DifferentialSystem(1, {parse_affine("1", 1), parse_affine("X1", 1)},
                              {FieldScalar::rational(1)});
}

DifferentialSystem sincos_system() {
    return DifferentialSystem(2, {parse_affine("1", 2), parse_affine("X2", 2), parse_affine("-X1", 2)},
                              {FieldScalar::rational(0), FieldScalar::rational(1)});
}

RationalPoint pt1(const std::string& c0, const std::string& c1) {
    return RationalPoint({parse_upoly(c0), parse_upoly(c1)});
}

}  // namespace

int main() {
    Field Q = Field::rationals();

    criterion(1, "Cantor expansion at N = 33 with certified residual", 1.0, [&] {
        auto F = solve_mahler(cantor_system(Q), 33);
        check(F.f(1) == testutil::cantor_series(Q, 33),
              "series is not the indicator of powers of two");
        auto res = verify_residual(cantor_system(Q), F, 33);
        check(res.size() == 1 && res[0] == OrdValue::at_least(33),
              "residual not AtLeast(33): " + res[0].to_string());
    });

    criterion(2, "rank-profile lambda equals F_p enumeration on three points", 30.0, [&] {
        struct Case {
            FunctionalPoint F;
            std::uint64_t p;
            const char* name;
        };
        std::vector<Case> cases;
        cases.push_back({solve_mahler(cantor_system(Q), 48), 2, "cantor/Q"});
        cases.push_back({solve_mahler(cantor_system(Field::prime(2)), 48), 2, "cantor/F2"});
        cases.push_back({solve_mahler(thue_morse_system(), 48), 3, "thue-morse"});
        for (const auto& c : cases)
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b) {
                    auto r = max_finite_ord(c.F, a, b, 48, OracleMode::FiniteField, c.p);
                    check(r.u > 16 || r.oracle_ran,
                          std::string(c.name) + ": oracle did not run despite u <= 16");
                    // any mismatch throws OracleMismatch, failing the criterion
                }
    });

    criterion(3, "Cantor lambda(1,1) = 3 and the witness achieves u - 1", 0, [&] {
        auto F = solve_mahler(cantor_system(Q), 32);
        auto m = max_finite_ord(F, 1, 1, 32);
        check(m.lambda == OrdValue::finite(3), "lambda(1,1) = " + m.lambda.to_string());
        auto w = aux_poly(F, 1, 1);
        check(w.u == 4, "u != 4");
        check(w.achieved == OrdValue::finite(3), "witness ord " + w.achieved.to_string());
    });

    criterion(4, "aux_poly ord >= u-1 on the 4x4 grid, three points, all cells", 0, [&] {
        std::vector<FunctionalPoint> points = {solve_mahler(cantor_system(Q), 80),
                                               solve_mahler(thue_morse_system(), 80),
                                               solve_differential(exp_system(), 80)};
        int cells = 0;
        for (const auto& F : points)
            for (int a = 0; a <= 3; ++a)
                for (int b = 0; b <= 3; ++b) {
                    if ((a + 1) * (b + 1) < 2) continue;
                    auto w = aux_poly(F, a, b);
                    check(w.achieved.value() >= w.u - 1,
                          "cell (" + std::to_string(a) + "," + std::to_string(b) + "): ord " +
                              std::to_string(w.achieved.value()) + " < " + std::to_string(w.u - 1));
                    ++cells;
                }
        check(cells == 3 * 15, "unexpected cell count");
    });

    criterion(5, "Cantor pullback growth laws and empirical lambda >= 2", 0, [&] {
        auto S = cantor_system(Q);
        auto T = MapSpec::pullback_from_system(S);
        check(T.growth().mu == 1 && T.growth().nu0 == 2 && T.growth().nu1 == 1,
              "structural constants are not (1, 2, 1)");
        auto F = solve_mahler(S, 96);
        auto rep = growth_report(T, F, 100, 4, 20240810);
        check(rep.degree_violations == 0, std::to_string(rep.degree_violations) +
                                              " degree-law violations");
        check(rep.lambda_certified > 0, "no certified lambda samples");
        check(rep.empirical_lambda && *rep.empirical_lambda >= 2,
              "empirical lambda below 2");
        check(!rep.lambda_flagged, "lambda flagged below the declared value");
    });

    criterion(6, "derivation commutes with bi-homogenization on 100 random P, two systems", 0, [&] {
        testutil::Rng rng(66);
        for (const auto& sys : {exp_system(), sincos_system()}) {
            auto D = MapSpec::derivation(sys);
            for (int trial = 0; trial < 100; ++trial) {
                auto p = rng.affine_poly(sys.n(), Q);
                check(D.apply(bihomogenize(p)) == bihomogenize(D.apply_affine(p)),
                      "identity failed at trial " + std::to_string(trial));
            }
        }
    });

    criterion(7, "degree-height inequality on a 200-case corpus, tight case included", 0, [&] {
        auto tight = liouville_check(parse_affine("X1^2", 1), SplitCycle({pt1("1", "z")}, {1}));
        check(tight.holds && tight.slack == 0, "tight case is not tight");

        testutil::Rng rng(77);
        int done = 0;
        while (done < 200) {
            std::vector<RationalPoint> pts;
            std::vector<long> mult;
            int npts = 1 + rng.below(2);
            for (int i = 0; i < npts; ++i) {
                std::vector<UPoly> coords;
                for (int c = 0; c < 2; ++c) {
                    int d = rng.below(3);
                    std::vector<FieldScalar> cs;
                    for (int k = 0; k <= d; ++k) cs.push_back(rng.scalar(Q, 3));
                    coords.emplace_back(Q, cs);
                }
                if (coords[0].is_zero() && coords[1].is_zero())
                    coords[0] = UPoly::constant(FieldScalar::rational(1));
                pts.emplace_back(std::move(coords));
                mult.push_back(1 + rng.below(2));
            }
            SplitCycle cyc(pts, mult);
            if (cyc.height() > 6) continue;
            auto q = rng.affine_poly(1, Q, 2, 2, 4);
            if (q.is_zero()) continue;
            try {
                auto r = liouville_check(q, cyc);
                check(r.holds && r.slack >= 0, "inequality failed");
                ++done;
            } catch (const VanishesOnCycle&) {
            }
        }
    });

    criterion(8, "explicit constants: c_1, rho_2, C_m, and the two log paths", 0, [&] {
        check(constant_cn(1) == 26244, "c_1 != 26244");
        auto rho = rho_sequence(1, 1, 1);
        check(rho[2].exact_value() == 17496, "rho_2 != 17496");
        auto cm = constant_cm(1, rho);
        check(cm.exact_value() == BigRational(BigInt(17496) * 17496 * 17496), "C_m != 17496^3");

        auto exact = rho_sequence(1, 2, 1);
        ConstantsBudget tiny;
        tiny.exact_bits = 64;
        auto logged = rho_sequence(1, 2, 1, tiny);
        check(exact[2].is_exact() && !logged[2].is_exact(), "paths did not split");
        auto [le, ee] = exact[2].log2_value();
        auto [ll, el] = logged[2].log2_value();
        BigRational diff = le > ll ? le - ll : ll - le;
        check(diff <= le / (BigInt(1) << 30), "exact and log2 paths disagree beyond 2^-30");
    });

    criterion(9, "valuation axioms, distance invariance, weighted-degree scaling", 0, [&] {
        testutil::Rng rng(99);
        for (int trial = 0; trial < 200; ++trial) {
            auto a = rng.series(Q, 12);
            auto b = rng.series(Q, 12);
            auto oa = ord_series(a), ob = ord_series(b);
            if (oa.is_finite() && ob.is_finite() && oa.value() + ob.value() < 12)
                check(ord_series(mul_series(a, b)) == OrdValue::finite(oa.value() + ob.value()),
                      "ord is not additive on products");
            auto osum = ord_series(a + b);
            check(osum.lower_bound() >= std::min(oa.lower_bound(), ob.lower_bound()),
                  "ultrametric inequality failed");
            if (oa.is_finite() && ob.is_finite() && oa.value() != ob.value())
                check(osum == OrdValue::finite(std::min(oa.value(), ob.value())),
                      "ultrametric equality failed");
        }
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<TruncatedSeries> x, y;
            for (int i = 0; i < 3; ++i) {
                x.push_back(rng.series(Q, 16));
                y.push_back(rng.series(Q, 16));
            }
            x[0].coeff(0) = FieldScalar::rational(1);
            y[0].coeff(0) = FieldScalar::rational(1);
            auto unit = rng.series(Q, 16);
            unit.coeff(0) = rng.nonzero_scalar(Q);
            std::vector<TruncatedSeries> xs;
            for (const auto& s : x) xs.push_back(mul_series(s, unit));
            check(point_distance(xs, y) == point_distance(x, y),
                  "distance moved under unit rescaling");
        }
        for (int trial = 0; trial < 20; ++trial) {
            BigRational d0(1 + rng.below(5)), d1(1 + rng.below(5));
            BigRational a(rng.below(7), 1 + rng.below(3)), b(1 + rng.below(7), 1 + rng.below(3));
            unsigned dim = rng.below(4);
            BigRational lam(1 + rng.below(9), 1 + rng.below(4));
            BigRational scale = 1;
            for (unsigned i = 0; i < dim; ++i) scale *= lam;
            check(deg_weighted(d0, d1, dim, lam * a, lam * b) ==
                      scale * deg_weighted(d0, d1, dim, a, b),
                  "scaling law failed");
        }
    });

    criterion(10, "stability checker with the exact violating witness", 0, [&] {
        auto T = MapSpec::pullback_from_system(cantor_system(Q));
        check(is_phi_stable(GeneratedIdeal({parse_bipoly("X1'", 1)}), T).stable,
              "<X1'> not stable");
        auto rep = is_phi_stable(GeneratedIdeal({parse_bipoly("X0 - X1", 1)}), T);
        check(!rep.stable, "<X0 - X1> reported stable");
        check(*rep.violating_image == parse_bipoly("X0'*X0 - X0'*X1 + X1'*X0", 1),
              "witness is not X0'(X0 - X1) + X1'X0");

        DifferentialSystem annihilating(1, {parse_affine("1", 1), AffinePolynomial(1, Q)},
                                        {FieldScalar::rational(1)});
        check(is_phi_stable(GeneratedIdeal({parse_bipoly("X1", 1)}),
                            MapSpec::derivation(annihilating))
                  .stable,
              "<X1> not stable under D with A1 = 0");
    });

    criterion(11, "4x4 Cantor scan at N = 128: finiteness, monotonicity, lower bounds", 120.0, [&] {
        auto F = solve_mahler(cantor_system(Q), 128);
        auto scan =
            multiplicity_scan(F, 3, 3, 128, BoundShape::ABP1_BP1T, 1u, OracleMode::Off, 2, 1);
        check(scan.all_finite, "not every cell is Finite with a stabilized kernel");
        for (const auto& c : scan.cells) {
            check(c.status == "ok" && c.stabilized,
                  "cell (" + std::to_string(c.a) + "," + std::to_string(c.b) + ") not stabilized");
            check(c.lambda.value() + c.kernel_dim_final + 1 >= c.u,
                  "lower bound failed at (" + std::to_string(c.a) + "," + std::to_string(c.b) + ")");
        }
        check(scan.monotone, "lambda is not monotone over the grid");
        check(scan.lower_bounds_hold, "lambda >= u - 1 - dim(slice) failed");
        check(scan.empirical_k.has_value(), "no empirical K reported");
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
