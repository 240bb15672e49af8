#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "multlab/estimates.hpp"
#include "multlab/upoly.hpp"

namespace multlab {

// Point of P^n over k(z) with coprime polynomial coordinates, optionally
// carrying a P^1 factor (a bi-projective point). Normalization at
// construction: divide by the monic gcd, then scale so the first nonzero
// coordinate is monic. That makes the representative canonical.
class RationalPoint {
public:
    explicit RationalPoint(std::vector<UPoly> coords,
                           std::optional<std::array<UPoly, 2>> prime = std::nullopt)
        : coords_(std::move(coords)), prime_(std::move(prime)) {
        if (coords_.empty()) throw ZeroVector("point needs coordinates");
        normalize(coords_);
        if (prime_) {
            std::vector<UPoly> pr(prime_->begin(), prime_->end());
            normalize(pr);
            (*prime_)[0] = pr[0];
            (*prime_)[1] = pr[1];
        }
    }

    const std::vector<UPoly>& coords() const noexcept { return coords_; }
    bool has_prime() const noexcept { return prime_.has_value(); }
    const std::array<UPoly, 2>& prime() const { return *prime_; }
    const Field& field() const noexcept { return coords_.front().field(); }
    int n() const noexcept { return static_cast<int>(coords_.size()) - 1; }

    // max coordinate degree: the only negative place of k(z) on coprime
    // polynomial coordinates is the one at infinity
    long height() const {
        long h = 0;
        for (const auto& c : coords_) h = std::max<long>(h, std::max(c.deg(), 0));
        return h;
    }

private:
    static void normalize(std::vector<UPoly>& v) {
        bool all_zero = true;
        for (const auto& c : v) all_zero = all_zero && c.is_zero();
        if (all_zero) throw ZeroVector("all coordinates vanish");
        UPoly g(v.front().field());
        for (const auto& c : v) g = UPoly::gcd(g, c);
        for (auto& c : v) c = c.divrem(g).first;
        for (const auto& c : v) {
            if (c.is_zero()) continue;
            FieldScalar inv = c.leading().inverse();
            for (auto& d : v) d = d * inv;
            break;
        }
    }

    std::vector<UPoly> coords_;
    std::optional<std::array<UPoly, 2>> prime_;
};

// 0-dimensional cycle: positive formal combination of k(z)-rational points.
class SplitCycle {
public:
    SplitCycle(std::vector<RationalPoint> points, std::vector<long> multiplicities)
        : points_(std::move(points)), mult_(std::move(multiplicities)) {
        if (points_.empty()) throw ConfigError("cycle needs at least one point");
        if (mult_.size() != points_.size()) throw ConfigError("one multiplicity per point");
        for (long m : mult_)
            if (m <= 0) throw ConfigError("multiplicities must be positive");
    }

    const std::vector<RationalPoint>& points() const noexcept { return points_; }
    const std::vector<long>& multiplicities() const noexcept { return mult_; }

    long degree() const {
        long d = 0;
        for (long m : mult_) d += m;
        return d;
    }

    long height() const {
        long h = 0;
        for (std::size_t i = 0; i < points_.size(); ++i) h += mult_[i] * points_[i].height();
        return h;
    }

private:
    std::vector<RationalPoint> points_;
    std::vector<long> mult_;
};

struct HeightDegree {
    long deg = 0;
    long h = 0;
};

inline HeightDegree heights_and_degrees(const RationalPoint& x) { return {1, x.height()}; }
inline HeightDegree heights_and_degrees(const SplitCycle& z) { return {z.degree(), z.height()}; }

// --- valuation distances --------------------------------------------------

inline OrdValue vector_ord(const std::vector<TruncatedSeries>& v) {
    std::vector<OrdValue> ords;
    ords.reserve(v.size());
    for (const auto& s : v) ords.push_back(ord_series(s));
    return ord_min(ords);
}

// ord(x ^ y) over all coordinate index pairs i < j (including coordinate 0).
inline OrdValue wedge_ord(const std::vector<TruncatedSeries>& x,
                          const std::vector<TruncatedSeries>& y) {
    if (x.size() != y.size()) throw ArityMismatch("wedge of vectors of different lengths");
    std::vector<OrdValue> ords;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            ords.push_back(ord_series(mul_series(x[i], y[j]) - mul_series(x[j], y[i])));
    return ord_min(ords);
}

// ord(x, y) = ord(x ^ y) - ord(x) - ord(y); independent of the chosen
// representatives.
inline OrdValue point_distance(const std::vector<TruncatedSeries>& x,
                               const std::vector<TruncatedSeries>& y) {
    OrdValue ox = vector_ord(x), oy = vector_ord(y);
    if (!ox.is_finite() || !oy.is_finite())
        throw ZeroVector("representative vanishes to the whole known precision");
    OrdValue w = wedge_ord(x, y);
    std::size_t shift = ox.value() + oy.value();
    return w.is_finite() ? OrdValue::finite(w.value() - shift)
                         : OrdValue::at_least(w.value() - shift);
}

namespace detail {

inline std::vector<TruncatedSeries> prime_factor(const FunctionalPoint& F) {
    const Field& f = F.field();
    return {TruncatedSeries::constant(f, FieldScalar::one(f), F.precision()),
            TruncatedSeries::identity(f, F.precision())};
}

inline std::vector<TruncatedSeries> main_factor(const FunctionalPoint& F) {
    std::vector<TruncatedSeries> v;
    v.push_back(TruncatedSeries::constant(F.field(), FieldScalar::one(F.field()), F.precision()));
    for (const auto& s : F.series()) v.push_back(s);
    return v;
}

inline std::vector<TruncatedSeries> to_series_vector(const std::vector<UPoly>& coords,
                                                     std::size_t precision) {
    std::vector<TruncatedSeries> v;
    v.reserve(coords.size());
    for (const auto& c : coords) v.push_back(c.to_series(precision));
    return v;
}

}  // namespace detail

// Bi-projective point-point distance: the min over the two factor
// distances. A target without a P^1 part compares against the main factor
// alone.
inline OrdValue ord_distance(const FunctionalPoint& x, const RationalPoint& y) {
    if (y.n() != x.n()) throw ArityMismatch("point arities differ");
    if (y.field() != x.field()) throw FieldMismatch("point fields differ");
    OrdValue main = point_distance(detail::main_factor(x),
                                   detail::to_series_vector(y.coords(), x.precision()));
    if (!y.has_prime()) return main;
    std::vector<UPoly> pr(y.prime().begin(), y.prime().end());
    OrdValue prime =
        point_distance(detail::prime_factor(x), detail::to_series_vector(pr, x.precision()));
    return ord_min({main, prime});
}

enum class DistanceMode { MinPair, Sum, Max };

// Cycle distance: Sum is the additive Ord over the points (with
// multiplicity), Max the single closest point.
inline OrdValue ord_distance(const FunctionalPoint& x, const SplitCycle& z, DistanceMode mode) {
    bool all_finite = true;
    std::size_t sum = 0, best = 0;
    for (std::size_t i = 0; i < z.points().size(); ++i) {
        OrdValue d = ord_distance(x, z.points()[i]);
        all_finite = all_finite && d.is_finite();
        sum += static_cast<std::size_t>(z.multiplicities()[i]) * d.lower_bound();
        best = std::max(best, d.lower_bound());
    }
    std::size_t v = (mode == DistanceMode::Sum) ? sum : best;
    if (mode == DistanceMode::MinPair && z.points().size() != 1)
        throw ConfigError("MinPair mode applies to single points");
    return all_finite ? OrdValue::finite(v) : OrdValue::at_least(v);
}

// Hypersurface distance Ord(x, Z(F)) = ord F(x) - deg F * ord x. The
// representative (1, z, 1, f) has ord 0, so the correction term drops out;
// deg F is the total bidegree.
inline OrdValue ord_distance(const FunctionalPoint& x, const BiPolynomial& hypersurface) {
    OrdValue of = ord_series(evaluate(hypersurface, x));
    OrdValue ox = vector_ord(detail::main_factor(x));  // 0 by construction
    long deg = hypersurface.deg_xprime() + hypersurface.deg_x();
    std::size_t shift = static_cast<std::size_t>(deg) * ox.lower_bound();
    return of.is_finite() ? OrdValue::finite(of.value() - shift)
                          : OrdValue::at_least(of.value() - shift);
}

// --- Liouville inequality ---------------------------------------------------

struct LiouvilleResult {
    bool holds = false;
    long lhs = 0;       // deg(Q) h(Z) + h(Q) deg(Z)
    long rhs = 0;       // |sum of ord Q(beta) over the cycle|
    long slack = 0;     // lhs - rhs
    std::vector<long> point_ords;
};

// deg(Q) h(Z) + h(Q) deg(Z) >= |sum_beta ord_{z=0} Q(beta)| for a cycle of
// k(z)-rational points; Q is X-homogenized at its own degree before
// evaluation. Exact polynomial arithmetic, no truncation.
inline LiouvilleResult liouville_check(const AffinePolynomial& q, const SplitCycle& z) {
    const int degx = q.deg_x();
    const int n = q.n();
    LiouvilleResult out;
    long total = 0;
    for (std::size_t pi = 0; pi < z.points().size(); ++pi) {
        const RationalPoint& pt = z.points()[pi];
        if (pt.n() != n) throw ArityMismatch("cycle point arity does not match polynomial");
        AffinePolynomial qq = q.field() == pt.field() ? q : q.to_field(pt.field());
        UPoly val(pt.field());
        for (const auto& [k, c] : qq.terms()) {
            UPoly term = UPoly::constant(c) * UPoly::monomial(pt.field(), k[0]);
            int xdeg = 0;
            for (int i = 1; i <= n; ++i) xdeg += k[i];
            for (int e = 0; e < degx - xdeg; ++e) term = term * pt.coords()[0];
            for (int i = 1; i <= n; ++i)
                for (int e = 0; e < k[i]; ++e) term = term * pt.coords()[i];
            val = val + term;
        }
        if (val.is_zero())
            throw VanishesOnCycle("Q vanishes identically at cycle point " + std::to_string(pi));
        out.point_ords.push_back(val.ord());
        total += z.multiplicities()[pi] * val.ord();
    }
    out.lhs = static_cast<long>(degx) * z.height() + static_cast<long>(q.height()) * z.degree();
    out.rhs = total < 0 ? -total : total;
    out.slack = out.lhs - out.rhs;
    out.holds = out.slack >= 0;
    return out;
}

// --- degree/height bookkeeping ---------------------------------------------

// Degree and height caps for an ideal of rank r containing an ideal p of
// rank r_p and generated over it by r - r_p polynomials of bi-degree at
// most (a, b).
inline std::pair<BigInt, BigInt> bezout_bounds(const BigInt& deg1_p, const BigInt& deg0_p,
                                               unsigned r, unsigned r_p, const BigInt& a,
                                               const BigInt& b) {
    if (r < r_p) throw ConfigError("need r >= r_p");
    unsigned k = r - r_p;
    auto ipow = [](const BigInt& x, unsigned e) {
        BigInt r = 1;
        for (unsigned i = 0; i < e; ++i) r *= x;
        return r;
    };
    BigInt first = deg1_p * ipow(b, k);
    BigInt second = deg0_p * ipow(b, k);
    if (k >= 1) second += BigInt(k) * deg1_p * a * ipow(b, k - 1);
    return {first, second};
}

// deg(X, a, b) = deg0 * b^dim + dim * deg1 * a * b^(dim-1).
inline BigRational deg_weighted(const BigRational& deg0, const BigRational& deg1, unsigned dim,
                                const BigRational& a, const BigRational& b) {
    auto rpow = [](const BigRational& x, unsigned e) {
        BigRational r = 1;
        for (unsigned i = 0; i < e; ++i) r *= x;
        return r;
    };
    BigRational out = deg0 * rpow(b, dim);
    if (dim >= 1) out += BigRational(dim) * deg1 * a * rpow(b, dim - 1);
    return out;
}

// --- delta pairs -------------------------------------------------------------

struct DeltaPair {
    int delta0 = 0, delta1 = 0;
    BiPolynomial witness;
    OrdValue witness_ord = OrdValue::finite(0);  // Finite: outside the observed slice
    bool slice_stabilized = false;               // stabilization flag at (delta0, delta1)
};

namespace detail {

// Linear vanishing conditions at a bi-projective point: each z-coefficient
// of P(x0', x1', x0..xn) is one row. Plain points take (1, z) for the P^1
// factor.
inline std::vector<std::vector<FieldScalar>> vanishing_rows(const RationalPoint& pt, int a, int b) {
    const Field& f = pt.field();
    UPoly x0p = UPoly::constant(FieldScalar::one(f));
    UPoly x1p = UPoly::monomial(f, 1);
    if (pt.has_prime()) {
        x0p = pt.prime()[0];
        x1p = pt.prime()[1];
    }
    auto keys = monomials_of_bidegree(pt.n(), a, b);
    std::vector<UPoly> evals;
    int maxdeg = 0;
    for (const auto& k : keys) {
        UPoly t = UPoly::constant(FieldScalar::one(f));
        for (int e = 0; e < k[0]; ++e) t = t * x0p;
        for (int e = 0; e < k[1]; ++e) t = t * x1p;
        for (int i = 0; i <= pt.n(); ++i)
            for (int e = 0; e < k[2 + i]; ++e) t = t * pt.coords()[i];
        maxdeg = std::max(maxdeg, t.deg());
        evals.push_back(std::move(t));
    }
    std::vector<std::vector<FieldScalar>> rows(
        static_cast<std::size_t>(maxdeg) + 1,
        std::vector<FieldScalar>(keys.size(), FieldScalar::zero(f)));
    for (std::size_t c = 0; c < evals.size(); ++c)
        for (int r = 0; r <= evals[c].deg(); ++r) rows[r][c] = evals[c].coeff(r);
    return rows;
}

}  // namespace detail

// Smallest bidegree (in the weighted order c' a + c b, ties broken by
// smaller b) admitting a polynomial that vanishes on the cycle and misses
// the observed vanishing slice of F. The witness is certified outside the
// slice by a Finite evaluation ord at the current precision.
inline DeltaPair delta_pair(const SplitCycle& z, const FunctionalPoint& F, const BigRational& cprime,
                            const BigRational& c, int cap) {
    if (cprime < 0 || c < 0) throw ConfigError("form coefficients must be nonnegative");
    OrdValue sep = ord_distance(F, z, DistanceMode::Max);
    if (!sep.is_finite())
        throw PrecisionExhausted("cannot certify F off the cycle at this precision");

    std::vector<std::pair<int, int>> order;
    for (int a = 0; a <= cap; ++a)
        for (int b = 0; b <= cap; ++b) order.emplace_back(a, b);
    std::sort(order.begin(), order.end(), [&](auto lhs, auto rhs) {
        BigRational vl = cprime * lhs.first + c * lhs.second;
        BigRational vr = cprime * rhs.first + c * rhs.second;
        if (vl != vr) return vl < vr;
        if (lhs.second != rhs.second) return lhs.second < rhs.second;
        return lhs.first < rhs.first;
    });

    for (auto [a, b] : order) {
        auto keys = monomials_of_bidegree(F.n(), a, b);
        std::vector<std::vector<FieldScalar>> rows;
        for (const auto& pt : z.points()) {
            if (pt.n() != F.n()) throw ArityMismatch("cycle point arity does not match F");
            auto r = detail::vanishing_rows(pt, a, b);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        ExactMatrix M = ExactMatrix::from_rows(F.field(), rows);
        auto kernel = kernel_basis(M);
        if (kernel.empty()) continue;
        auto evals = detail::monomial_evaluations(F, a, b, F.precision());
        for (const auto& v : kernel) {
            OrdValue o = ord_series(detail::combine(evals, v));
            if (!o.is_finite()) continue;  // inside the observed slice
            DeltaPair out{a, b, detail::poly_from_vector(F, keys, v), o, false};
            out.slice_stabilized = pf_slice(F, a, b, F.precision()).stabilized;
            return out;
        }
    }
    throw CapExceeded("no witness bidegree within the cap " + std::to_string(cap));
}

}  // namespace multlab
