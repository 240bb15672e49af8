#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "multlab/ideals.hpp"

namespace multlab {

namespace detail {

inline TruncatedSeries combine(const std::vector<TruncatedSeries>& evals,
                               const std::vector<FieldScalar>& coeffs) {
    TruncatedSeries acc(evals.front().field(), evals.front().precision());
    for (std::size_t i = 0; i < evals.size(); ++i)
        if (!coeffs[i].is_zero()) acc = acc + evals[i] * coeffs[i];
    return acc;
}

inline BiPolynomial poly_from_vector(const FunctionalPoint& F,
                                     const std::vector<std::vector<int>>& keys,
                                     const std::vector<FieldScalar>& coeffs) {
    BiPolynomial p(F.n(), F.field());
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (!coeffs[i].is_zero()) p.add_term(keys[i], coeffs[i]);
    return p;
}

}  // namespace detail

struct AuxPolyResult {
    BiPolynomial poly;
    OrdValue achieved;      // ord of the evaluation at F, Finite by construction
    std::size_t u = 0;      // monomial count (a+1)*C(b+n, n)
    std::size_t kernel_dim = 0;  // of the (u-1)-row truncation matrix
};

// Kill the first u-1 Taylor coefficients by linear algebra: guarantees a
// nonzero polynomial of bidegree <= (a,b) with ord of its evaluation
// >= u - 1, and returns the first kernel vector whose evaluation is not
// identically zero at the current precision.
inline AuxPolyResult aux_poly(const FunctionalPoint& F, int a, int b) {
    auto keys = monomials_of_bidegree(F.n(), a, b);
    std::size_t u = keys.size();
    if (u < 2) throw ConfigError("monomial space of bidegree (" + std::to_string(a) + "," +
                                 std::to_string(b) + ") has dimension " + std::to_string(u) +
                                 ", need >= 2");
    if (F.precision() < u)
        throw PrecisionExhausted("need precision >= u = " + std::to_string(u));

    auto evals = detail::monomial_evaluations(F, a, b, F.precision());
    ExactMatrix M = detail::truncation_matrix(evals, u - 1);
    auto kernel = kernel_basis(M);

    for (const auto& v : kernel) {
        TruncatedSeries s = detail::combine(evals, v);
        OrdValue o = ord_series(s);
        if (o.is_finite())
            return {detail::poly_from_vector(F, keys, v), o, u, kernel.size()};
    }
    throw AllInIdeal("every kernel vector evaluates to AtLeast(" +
                     std::to_string(F.precision()) + ") at bidegree (" + std::to_string(a) + "," +
                     std::to_string(b) + ")");
}

enum class OracleMode { Off, FiniteField };

struct MaxOrdResult {
    OrdValue lambda = OrdValue::finite(0);   // maximal finite vanishing order
    std::size_t u = 0;
    std::size_t kernel_dim_final = 0;        // dim of the observed vanishing slice
    bool stabilized = false;
    std::size_t window = 0;
    std::vector<std::size_t> rank_profile;
    bool oracle_ran = false;
    std::uint64_t oracle_candidates = 0;
    std::optional<std::size_t> oracle_lambda;
};

namespace detail {

// Brute force over F_p: max finite ord over all nonzero coefficient vectors
// (projective representatives; ord is scaling-invariant). Vectors whose
// evaluation vanishes through the whole precision are in the observed
// vanishing slice and are skipped.
inline std::pair<std::size_t, std::uint64_t> enumerate_max_ord(
    const std::vector<TruncatedSeries>& evals, std::uint64_t p, std::size_t N) {
    std::size_t u = evals.size();
    std::vector<std::vector<std::uint64_t>> col(u, std::vector<std::uint64_t>(N));
    for (std::size_t c = 0; c < u; ++c)
        for (std::size_t r = 0; r < N; ++r) col[c][r] = evals[c].coeff(r).residue_value();

    std::size_t best = 0;
    std::uint64_t candidates = 0;
    std::vector<std::uint64_t> v(u, 0);
    // first nonzero coordinate pinned to 1
    for (std::size_t lead = 0; lead < u; ++lead) {
        std::vector<std::uint64_t> tail(u - lead - 1, 0);
        bool done = false;
        while (!done) {
            v.assign(u, 0);
            v[lead] = 1;
            for (std::size_t i = 0; i < tail.size(); ++i) v[lead + 1 + i] = tail[i];
            ++candidates;
            std::size_t ord = N;  // AtLeast marker
            for (std::size_t r = 0; r < N; ++r) {
                std::uint64_t s = 0;
                for (std::size_t c = lead; c < u; ++c)
                    if (v[c]) s = (s + v[c] * col[c][r]) % p;
                if (s != 0) { ord = r; break; }
            }
            if (ord < N && ord > best) best = ord;
            // increment tail as a base-p counter
            done = true;
            for (std::size_t i = tail.size(); i-- > 0;) {
                if (++tail[i] < p) { done = false; break; }
                tail[i] = 0;
            }
            if (tail.empty()) done = true;
        }
    }
    return {best, candidates};
}

}  // namespace detail

// Lambda(a,b) = max{ r : dim ker M_r > dim ker M_N } where M_r stacks the
// first r Taylor-coefficient linear forms of the monomial evaluations.
// Vectors in ker M_N are the observed vanishing slice and count as
// "evaluates to zero". Requires kernel stabilization over the trailing
// window. With the finite-field oracle the result is cross-checked by full
// enumeration over F_p (reducing a rational point mod p first).
inline MaxOrdResult max_finite_ord(const FunctionalPoint& F, int a, int b, std::size_t N,
                                   OracleMode oracle = OracleMode::Off,
                                   std::uint64_t oracle_p = 2, std::size_t window = 0) {
    if (N < 1 || N > F.precision())
        throw PrecisionExhausted("need precision >= N = " + std::to_string(N));
    auto keys = monomials_of_bidegree(F.n(), a, b);
    std::size_t u = keys.size();
    if (window == 0) window = std::max<std::size_t>(8, u);

    auto evals = detail::monomial_evaluations(F, a, b, N);
    ExactMatrix M = detail::truncation_matrix(evals, N);
    auto profile = rank_profile(M);

    MaxOrdResult out;
    out.u = u;
    out.window = window;
    out.rank_profile = profile;
    out.kernel_dim_final = u - profile[N];
    out.stabilized = N > window && profile[N - window] == profile[N];
    if (!out.stabilized)
        throw PrecisionExhausted("rank of the truncation matrix did not stabilize over the last " +
                                 std::to_string(window) + " rows at N = " + std::to_string(N));

    std::size_t lam = 0;
    for (std::size_t r = 0; r <= N; ++r)
        if (profile[r] < profile[N]) lam = r;
    out.lambda = OrdValue::finite(lam);

    if (oracle == OracleMode::FiniteField) {
        double cost = std::pow(static_cast<double>(oracle_p), static_cast<double>(u));
        if (u <= 16 && cost <= double(1 << 24)) {
            Field fp = F.field().is_rational() ? Field::prime(oracle_p) : F.field();
            const std::uint64_t p = fp.characteristic();
            FunctionalPoint G = F.field().is_rational() ? F.to_field(fp) : F;
            auto evals_p = detail::monomial_evaluations(G, a, b, N);
            auto [enum_lambda, candidates] = detail::enumerate_max_ord(evals_p, p, N);
            out.oracle_ran = true;
            out.oracle_candidates = candidates;
            out.oracle_lambda = enum_lambda;

            // The check is same-field: the enumeration must reproduce the
            // rank-profile value over F_p. (A rational point is reduced mod p
            // first; its rank profile can genuinely differ from the one over
            // Q, so comparing across fields would not be an algorithm check.)
            ExactMatrix Mp = detail::truncation_matrix(evals_p, N);
            auto prof_p = rank_profile(Mp);
            std::size_t lam_p = 0;
            for (std::size_t r = 0; r <= N; ++r)
                if (prof_p[r] < prof_p[N]) lam_p = r;
            if (lam_p != enum_lambda)
                throw OracleMismatch("rank-profile lambda " + std::to_string(lam_p) + " != " +
                                     std::to_string(enum_lambda) + " from enumeration over F_" +
                                     std::to_string(p));
        }
    }
    return out;
}

// --- multiplicity scan ----------------------------------------------------

enum class BoundShape { AP1_BP1T, ABP1_BP1T };  // (a+1)(b+1)^t and (a+b+1)(b+1)^t

inline BigRational shape_value(BoundShape s, int a, int b, unsigned t) {
    BigRational base = (s == BoundShape::AP1_BP1T) ? BigRational(a + 1) : BigRational(a + b + 1);
    BigRational pw = 1;
    for (unsigned i = 0; i < t; ++i) pw *= (b + 1);
    return base * pw;
}

struct ScanCell {
    int a = 0, b = 0;
    std::string status = "ok";               // "ok" or the error kind
    std::string detail;                      // error message when status != ok
    OrdValue lambda = OrdValue::finite(0);
    std::size_t u = 0;
    std::size_t kernel_dim_final = 0;
    bool stabilized = false;
    std::size_t lower_bound_u_minus_1 = 0;
    std::optional<OrdValue> aux_ord;         // witness ord from aux_poly
    std::string aux_status = "skipped";     // ok / AllInIdeal / skipped / error kind
    BigRational ratio_ap1;                   // lambda / (a+1)(b+1)^t
    BigRational ratio_abp1;                  // lambda / (a+b+1)(b+1)^t
    bool oracle_ran = false;
};

struct OrdScanResult {
    int amax = 0, bmax = 0;
    std::size_t N = 0;
    unsigned t = 0;
    BoundShape shape = BoundShape::ABP1_BP1T;
    std::vector<ScanCell> cells;             // row-major over (a, b)
    std::optional<BigRational> empirical_k;  // max lambda/shape over finite cells
    bool all_finite = false;
    bool monotone = false;                   // lambda nondecreasing in a and in b
    bool lower_bounds_hold = false;          // lambda >= u - 1 - dim(slice) cellwise

    const ScanCell& cell(int a, int b) const {
        return cells.at(static_cast<std::size_t>(a) * (bmax + 1) + b);
    }
};

// Full grid of empirical maximal finite vanishing orders with per-cell
// diagnostics, plus the comparisons the bound shapes ask for. Cells compute
// independently; `threads` > 1 distributes them (result assembly is keyed
// by cell, so the output is identical for any thread count).
inline OrdScanResult multiplicity_scan(const FunctionalPoint& F, int amax, int bmax, std::size_t N,
                                       BoundShape shape, std::optional<unsigned> t_param = {},
                                       OracleMode oracle = OracleMode::Off,
                                       std::uint64_t oracle_p = 2, unsigned threads = 1) {
    if (amax < 0 || bmax < 0) throw ConfigError("grid bounds must be >= 0");
    std::optional<unsigned> t_opt = t_param ? t_param : F.declared_tf();
    if (!t_opt)
        throw MissingParam("transcendence degree t: pass it explicitly or declare it on the point");
    unsigned t = *t_opt;

    OrdScanResult out;
    out.amax = amax;
    out.bmax = bmax;
    out.N = N;
    out.t = t;
    out.shape = shape;
    out.cells.assign(static_cast<std::size_t>(amax + 1) * (bmax + 1), ScanCell{});

    auto run_cell = [&](int a, int b) {
        ScanCell cell;
        cell.a = a;
        cell.b = b;
        cell.u = monomials_of_bidegree(F.n(), a, b).size();
        cell.lower_bound_u_minus_1 = cell.u - 1;
        try {
            MaxOrdResult m = max_finite_ord(F, a, b, N, oracle, oracle_p);
            cell.lambda = m.lambda;
            cell.kernel_dim_final = m.kernel_dim_final;
            cell.stabilized = m.stabilized;
            cell.oracle_ran = m.oracle_ran;
            cell.ratio_ap1 = BigRational(m.lambda.value()) / shape_value(BoundShape::AP1_BP1T, a, b, t);
            cell.ratio_abp1 =
                BigRational(m.lambda.value()) / shape_value(BoundShape::ABP1_BP1T, a, b, t);
        } catch (const Error& e) {
            cell.status = e.kind();
            cell.detail = e.what();
        }
        if (cell.u >= 2) {
            try {
                auto aux = aux_poly(F, a, b);
                cell.aux_ord = aux.achieved;
                cell.aux_status = "ok";
            } catch (const Error& e) {
                cell.aux_status = e.kind();
            }
        }
        return cell;
    };

    std::vector<std::pair<int, int>> grid;
    for (int a = 0; a <= amax; ++a)
        for (int b = 0; b <= bmax; ++b) grid.emplace_back(a, b);

    if (threads <= 1) {
        for (auto [a, b] : grid)
            out.cells[static_cast<std::size_t>(a) * (bmax + 1) + b] = run_cell(a, b);
    } else {
        std::vector<std::thread> pool;
        std::size_t stripe = std::min<std::size_t>(threads, grid.size());
        for (std::size_t w = 0; w < stripe; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t i = w; i < grid.size(); i += stripe) {
                    auto [a, b] = grid[i];
                    out.cells[static_cast<std::size_t>(a) * (bmax + 1) + b] = run_cell(a, b);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    out.all_finite = true;
    out.monotone = true;
    out.lower_bounds_hold = true;
    for (const auto& cell : out.cells) {
        if (cell.status != "ok" || !cell.lambda.is_finite()) {
            out.all_finite = false;
            continue;
        }
        BigRational ratio = shape == BoundShape::AP1_BP1T ? cell.ratio_ap1 : cell.ratio_abp1;
        if (!out.empirical_k || ratio > *out.empirical_k) out.empirical_k = ratio;
        if (cell.lambda.value() + cell.kernel_dim_final + 1 < cell.u)
            out.lower_bounds_hold = false;  // lambda < u - 1 - dim(slice)
    }
    for (int a = 0; a <= amax && out.monotone; ++a)
        for (int b = 0; b <= bmax; ++b) {
            const ScanCell& c = out.cell(a, b);
            if (c.status != "ok") continue;
            if (a + 1 <= amax) {
                const ScanCell& r = out.cell(a + 1, b);
                if (r.status == "ok" && r.lambda.value() < c.lambda.value()) out.monotone = false;
            }
            if (b + 1 <= bmax) {
                const ScanCell& r = out.cell(a, b + 1);
                if (r.status == "ok" && r.lambda.value() < c.lambda.value()) out.monotone = false;
            }
        }
    return out;
}

// CSV rendering: one row per cell, exact values as strings.
inline std::string scan_to_csv(const OrdScanResult& scan) {
    std::string out =
        "a,b,lambda_kind,lambda_value,kernel_dim_final,stabilized,lower_bound_u_minus_1,ratio\n";
    for (const auto& c : scan.cells) {
        BigRational ratio = scan.shape == BoundShape::AP1_BP1T ? c.ratio_ap1 : c.ratio_abp1;
        out += std::to_string(c.a) + "," + std::to_string(c.b) + ",";
        if (c.status != "ok") {
            out += c.status + ",,,,,\n";
            continue;
        }
        out += (c.lambda.is_finite() ? std::string("Finite") : std::string("AtLeast")) + "," +
               std::to_string(c.lambda.value()) + "," + std::to_string(c.kernel_dim_final) + "," +
               (c.stabilized ? "true" : "false") + "," + std::to_string(c.lower_bound_u_minus_1) +
               "," + ratio.str() + "\n";
    }
    return out;
}

}  // namespace multlab
