#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "multlab/dynamics.hpp"
#include "multlab/matrix.hpp"

namespace multlab {

// Finitely generated bi-homogeneous ideal.
class GeneratedIdeal {
public:
    explicit GeneratedIdeal(std::vector<BiPolynomial> generators)
        : generators_(std::move(generators)) {
        if (generators_.empty()) throw ConfigError("ideal needs at least one generator");
        for (const auto& g : generators_) {
            if (g.is_zero()) throw ConfigError("zero generator");
            if (!g.is_bihomogeneous()) throw NotBiHomogeneous("generators must be bi-homogeneous");
            generators_.front().check_compatible(g);
        }
    }

    const std::vector<BiPolynomial>& generators() const noexcept { return generators_; }
    int n() const noexcept { return generators_.front().n(); }
    const Field& field() const noexcept { return generators_.front().field(); }

private:
    std::vector<BiPolynomial> generators_;
};

// How P was written over the generators: (generator index, monomial key,
// coefficient) triples with m*g summing to P.
struct MembershipCertificate {
    bool member = false;
    std::vector<std::tuple<std::size_t, std::vector<int>, FieldScalar>> combination;

    BiPolynomial recombine(const GeneratedIdeal& I) const {
        BiPolynomial acc(I.n(), I.field());
        for (const auto& [gi, key, c] : combination)
            acc = acc + BiPolynomial::monomial(I.n(), I.field(), key) * I.generators()[gi] * c;
        return acc;
    }
};

// Exact ideal membership at a fixed bidegree: the (a,b) slice of <G> is the
// span of m*g over monomials m with matching bidegree. Linear algebra only,
// no Groebner machinery.
inline MembershipCertificate slice_membership(const GeneratedIdeal& I, const BiPolynomial& P) {
    if (P.n() != I.n()) throw ArityMismatch("polynomial arity does not match ideal");
    if (P.field() != I.field()) throw FieldMismatch("polynomial field does not match ideal");
    if (!P.is_bihomogeneous()) throw NotBiHomogeneous("slice membership needs bi-homogeneous input");
    MembershipCertificate cert;
    if (P.is_zero()) {
        cert.member = true;
        return cert;
    }
    auto [a, b] = P.bidegree();
    auto rows_keys = monomials_of_bidegree(I.n(), a, b);
    std::map<std::vector<int>, std::size_t> row_of;
    for (std::size_t r = 0; r < rows_keys.size(); ++r) row_of.emplace(rows_keys[r], r);

    std::vector<std::pair<std::size_t, std::vector<int>>> col_labels;
    std::vector<std::vector<FieldScalar>> cols;
    for (std::size_t gi = 0; gi < I.generators().size(); ++gi) {
        const BiPolynomial& g = I.generators()[gi];
        auto [ga, gb] = g.bidegree();
        if (ga > a || gb > b) continue;
        for (const auto& mkey : monomials_of_bidegree(I.n(), a - ga, b - gb)) {
            BiPolynomial prod = BiPolynomial::monomial(I.n(), I.field(), mkey) * g;
            std::vector<FieldScalar> col(rows_keys.size(), FieldScalar::zero(I.field()));
            for (const auto& [k, c] : prod.terms()) col[row_of.at(k)] = c;
            cols.push_back(std::move(col));
            col_labels.emplace_back(gi, mkey);
        }
    }
    if (cols.empty()) return cert;

    ExactMatrix M(I.field(), rows_keys.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < rows_keys.size(); ++r) M.at(r, c) = cols[c][r];
    std::vector<FieldScalar> rhs(rows_keys.size(), FieldScalar::zero(I.field()));
    for (const auto& [k, c] : P.terms()) rhs[row_of.at(k)] = c;

    auto x = solve_linear(M, rhs);
    if (!x) return cert;
    cert.member = true;
    for (std::size_t c = 0; c < x->size(); ++c)
        if (!(*x)[c].is_zero())
            cert.combination.emplace_back(col_labels[c].first, col_labels[c].second, (*x)[c]);
    return cert;
}

struct StabilityReport {
    bool stable = true;
    std::optional<std::size_t> violating_generator;
    std::optional<BiPolynomial> violating_image;  // phi(g) outside the ideal
    // The generator check certifies phi(I) <= I exactly for the two
    // supported map kinds: derivations obey the Leibniz rule and pullbacks
    // are ring morphisms, so images of arbitrary elements reduce to images
    // of generators.
    std::string soundness_note =
        "generator check is exact for derivations (Leibniz) and substitution morphisms "
        "(multiplicativity)";
};

inline StabilityReport is_phi_stable(const GeneratedIdeal& I, const MapSpec& phi) {
    if (phi.n() != I.n()) throw ArityMismatch("map arity does not match ideal");
    StabilityReport rep;
    for (std::size_t gi = 0; gi < I.generators().size(); ++gi) {
        BiPolynomial img = phi.apply(I.generators()[gi]);
        if (img.is_zero()) continue;
        if (!slice_membership(I, img).member) {
            rep.stable = false;
            rep.violating_generator = gi;
            rep.violating_image = std::move(img);
            return rep;
        }
    }
    return rep;
}

// Basis of a graded piece of the observed vanishing ideal of a functional
// point.
struct SliceBasis {
    int a = 0, b = 0;
    std::vector<BiPolynomial> basis;        // bidegree-(a,b) relations found
    bool stabilized = false;                // kernel unchanged over the window
    std::size_t window = 0;
    std::vector<std::size_t> kernel_dims;   // dim ker M_r for r = 0..N
};

namespace detail {

// Evaluations of all bidegree-(a,b) monomials at the point, aligned with
// monomials_of_bidegree order.
inline std::vector<TruncatedSeries> monomial_evaluations(const FunctionalPoint& F, int a, int b,
                                                         std::size_t precision) {
    const Field& fld = F.field();
    std::vector<std::vector<TruncatedSeries>> pow(F.n());
    for (int i = 0; i < F.n(); ++i) {
        pow[i].push_back(TruncatedSeries::constant(fld, FieldScalar::one(fld), precision));
        for (int e = 1; e <= b; ++e)
            pow[i].push_back(mul_series(pow[i].back(), F.f(i + 1).truncated(precision)));
    }
    std::vector<TruncatedSeries> evals;
    for (const auto& k : monomials_of_bidegree(F.n(), a, b)) {
        TruncatedSeries t = TruncatedSeries::constant(fld, FieldScalar::one(fld), precision);
        for (int i = 0; i < F.n(); ++i)
            if (k[3 + i]) t = mul_series(t, pow[i][k[3 + i]]);
        if (k[1]) t = shift_series(t, k[1]);  // X1' -> z
        evals.push_back(std::move(t));
    }
    return evals;
}

inline ExactMatrix truncation_matrix(const std::vector<TruncatedSeries>& evals, std::size_t rows) {
    ExactMatrix M(evals.front().field(), rows, evals.size());
    for (std::size_t c = 0; c < evals.size(); ++c)
        for (std::size_t r = 0; r < rows; ++r) M.at(r, c) = evals[c].coeff(r);
    return M;
}

}  // namespace detail

// Kernel of (coefficients of bidegree-(a,b) polynomials) -> (first N Taylor
// coefficients of the evaluation at F). The stabilization flag is the
// heuristic certificate that the kernel already equals the true slice: the
// rank must not move over the trailing `window` rows (default
// max(8, monomial count)).
inline SliceBasis pf_slice(const FunctionalPoint& F, int a, int b, std::size_t N,
                           std::size_t window = 0) {
    if (N < 1 || N > F.precision())
        throw PrecisionExhausted("need precision >= N = " + std::to_string(N) +
                                 " to build the evaluation matrix");
    auto keys = monomials_of_bidegree(F.n(), a, b);
    auto evals = detail::monomial_evaluations(F, a, b, N);
    std::size_t u = keys.size();
    if (window == 0) window = std::max<std::size_t>(8, u);

    ExactMatrix M = detail::truncation_matrix(evals, N);
    auto profile = rank_profile(M);

    SliceBasis out;
    out.a = a;
    out.b = b;
    out.window = window;
    out.kernel_dims.reserve(profile.size());
    for (std::size_t r = 0; r < profile.size(); ++r) out.kernel_dims.push_back(u - profile[r]);
    out.stabilized = N > window && profile[N - window] == profile[N];

    for (const auto& v : kernel_basis(M)) {
        BiPolynomial p(F.n(), F.field());
        for (std::size_t c = 0; c < u; ++c)
            if (!v[c].is_zero()) p.add_term(keys[c], v[c]);
        out.basis.push_back(std::move(p));
    }
    return out;
}

}  // namespace multlab
