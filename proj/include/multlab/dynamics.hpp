#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multlab/bipoly.hpp"
#include "multlab/funceq.hpp"

namespace multlab {

struct GrowthConstants {
    BigRational mu = 1, nu0 = 1, nu1 = 0;  // degree growth
    BigRational lambda = 1;                // ord growth factor
    unsigned k_lambda = 0;                 // ord threshold for the lambda law

    void validate() const {
        if (mu <= 0 || nu0 <= 0) throw ConfigError("mu and nu0 must be positive");
        if (nu1 < 0) throw ConfigError("nu1 must be nonnegative");
        if (lambda <= 0) throw ConfigError("lambda must be positive");
    }
};

// A self-map of the bi-graded ring: either the derivation attached to a
// differential system (acting through d/dX1' and d/dXi with bi-homogenized
// coefficients) or the pullback Q -> Q o T of the morphism attached to a
// Mahler system.
//
// Derivation coefficients are homogenized to consistent bidegrees, hA0 at
// (s0, q0) and hAi at (s0-1, q0+1): that is what makes the operator graded
// (bidegree shift exactly (s0-1, q0)) and makes D(hP) = h(D(P)) an exact
// identity at declared degree bounds.
class MapSpec {
public:
    enum class Kind { Derivation, MahlerPullback };

    static MapSpec derivation(const DifferentialSystem& sys,
                              std::optional<GrowthConstants> declared = {}) {
        return derivation_from_affine(sys.n(), sys.a(), sys.field(), declared);
    }

    // The derivation is defined by A0..An alone; initial values belong to
    // the system, not to the map.
    static MapSpec derivation_from_affine(int n, const std::vector<AffinePolynomial>& a,
                                          const Field& field,
                                          std::optional<GrowthConstants> declared = {}) {
        if (static_cast<int>(a.size()) != n + 1)
            throw ArityMismatch("derivation needs A0..An");
        int s0 = a[0].deg_z();
        int q0 = a[0].deg_x();
        for (int i = 1; i <= n; ++i) {
            if (a[i].is_zero()) continue;
            s0 = std::max(s0, a[i].deg_z() + 1);
            q0 = std::max(q0, a[i].deg_x() - 1);
        }
        s0 = std::max(s0, 1);  // hA0 needs bidegree (s0,q0) with s0-1 >= 0
        q0 = std::max(q0, 0);

        MapSpec m;
        m.kind_ = Kind::Derivation;
        m.n_ = n;
        m.field_ = field;
        m.affine_a_ = a;
        m.ha_.push_back(bihomogenize(a[0], s0, q0));
        for (int i = 1; i <= n; ++i)
            m.ha_.push_back(a[i].is_zero() ? BiPolynomial(n, field)
                                           : bihomogenize(a[i], s0 - 1, q0 + 1));
        m.s0_ = s0;
        m.q0_ = q0;
        m.growth_ = declared.value_or(m.structural_growth(std::nullopt));
        m.growth_.validate();
        return m;
    }

    static MapSpec mahler_pullback(std::vector<BiPolynomial> aprime, std::vector<BiPolynomial> a,
                                   std::optional<GrowthConstants> declared = {}) {
        if (aprime.size() != 2) throw ArityMismatch("pullback needs A0', A1'");
        if (a.empty()) throw ArityMismatch("pullback needs A0..An");
        MapSpec m;
        m.kind_ = Kind::MahlerPullback;
        m.n_ = a[0].n();
        m.field_ = a[0].field();
        for (const auto& p : aprime) {
            if (p.is_zero()) throw ConfigError("A0' and A1' must be nonzero");
            if (p.deg_x() != 0 || !p.is_bihomogeneous())
                throw NotBiHomogeneous("A0', A1' must be homogeneous in the X' group alone");
        }
        if (aprime[0].bidegree() != aprime[1].bidegree())
            throw NotBiHomogeneous("A0' and A1' must share one degree");
        if (a[0].is_zero()) throw ConfigError("A0 must be nonzero");
        std::pair<int, int> sq = a[0].bidegree();
        for (const auto& p : a) {
            if (p.n() != m.n_) throw ArityMismatch("A_i arity mismatch");
            if (p.is_zero()) continue;
            if (!p.is_bihomogeneous() || p.bidegree() != sq)
                throw NotBiHomogeneous("A0..An must share one bidegree (s, q)");
        }
        m.aprime_ = std::move(aprime);
        m.ha_ = std::move(a);
        m.growth_ = declared.value_or(m.structural_growth(std::nullopt));
        m.growth_.validate();
        return m;
    }

    // The morphism mutually associated with a Mahler system: the X' pair
    // homogenizes p = num/den to degree r = max(deg num, deg den), the X
    // group homogenizes A0..An to their common bidegree.
    static MapSpec pullback_from_system(const MahlerSystem& sys,
                                        std::optional<GrowthConstants> declared = {}) {
        const Field& f = sys.field();
        int n = sys.n();
        int r = std::max(std::max(sys.p_num().deg(), sys.p_den().deg()), 1);
        auto homogenize_prime = [&](const UPoly& u) {
            BiPolynomial p(n, f);
            std::vector<int> key(static_cast<std::size_t>(n) + 3, 0);
            for (int k = 0; k <= u.deg(); ++k) {
                if (u.coeff(k).is_zero()) continue;
                key[0] = r - k;
                key[1] = k;
                p.add_term(key, u.coeff(k));
            }
            return p;
        };
        int s = 0, q = 0;
        for (const auto& p : sys.a()) {
            s = std::max(s, p.deg_z());
            q = std::max(q, p.deg_x());
        }
        std::vector<BiPolynomial> a;
        for (const auto& p : sys.a())
            a.push_back(p.is_zero() ? BiPolynomial(n, f) : bihomogenize(p, s, q));
        GrowthConstants g;
        if (declared) {
            g = *declared;
        } else {
            g.mu = q;
            g.nu0 = r;
            g.nu1 = s;
            g.lambda = sys.delta();  // ord Q(T(f)) >= delta ord Q(f)
            g.k_lambda = 0;
        }
        return mahler_pullback({homogenize_prime(sys.p_den()), homogenize_prime(sys.p_num())},
                               std::move(a), g);
    }

    Kind kind() const noexcept { return kind_; }
    int n() const noexcept { return n_; }
    const Field& field() const noexcept { return field_; }
    const GrowthConstants& growth() const noexcept { return growth_; }
    const std::vector<BiPolynomial>& ha() const noexcept { return ha_; }
    const std::vector<BiPolynomial>& aprime() const noexcept { return aprime_; }

    // Exact bidegree shift of a derivation.
    std::pair<int, int> derivation_shift() const {
        if (kind_ != Kind::Derivation) throw ConfigError("not a derivation");
        return {s0_ - 1, q0_};
    }

    // Structural multiplicative constants. For a pullback these are exact
    // ((mu,nu0,nu1) = (q,r,s)); for a derivation the additive shift
    // (s0-1, q0) turns into multiplicative constants valid for deg_X Q >= 1.
    GrowthConstants structural_growth(std::optional<GrowthConstants> declared) const {
        GrowthConstants g;
        if (kind_ == Kind::MahlerPullback) {
            g.mu = ha_[0].bidegree().second;
            g.nu0 = aprime_[0].bidegree().first;
            g.nu1 = ha_[0].bidegree().first;
        } else {
            g.mu = 1 + q0_;
            g.nu0 = 1;
            g.nu1 = s0_ - 1;
        }
        if (declared) {
            g.lambda = declared->lambda;
            g.k_lambda = declared->k_lambda;
        } else if (kind_ == Kind::Derivation) {
            // ord D(Q)(f) >= ord Q(f) - 1, so ratio >= 1/2 once ord >= 2
            g.lambda = BigRational(1, 2);
            g.k_lambda = 2;
        }
        if (g.mu <= 0) g.mu = 1;    // degenerate constant maps
        if (g.nu0 <= 0) g.nu0 = 1;
        return g;
    }

    bool multiplicative_constants_need_degx() const {
        return kind_ == Kind::Derivation && (q0_ > 0 || s0_ > 1);
    }

    // One application of the map to a bi-homogeneous polynomial.
    BiPolynomial apply(const BiPolynomial& q) const {
        if (q.n() != n_) throw ArityMismatch("polynomial arity does not match map");
        if (!q.is_bihomogeneous()) throw NotBiHomogeneous("apply_map needs bi-homogeneous input");
        if (kind_ == Kind::Derivation) {
            BiPolynomial acc = ha_[0] * q.derivative(1);  // hA0 d/dX1'
            for (int i = 1; i <= n_; ++i)
                acc = acc + ha_[i] * q.derivative(2 + static_cast<std::size_t>(i));
            return acc;
        }
        std::vector<BiPolynomial> sx(ha_.begin(), ha_.end());
        return q.substitute(aprime_[0], aprime_[1], sx);
    }

    // Affine action of a derivation: D(P) = A0 dP/dz + sum Ai dP/dXi, with
    // declared bounds raised by the bidegree shift so homogenization
    // commutes with the action.
    AffinePolynomial apply_affine(const AffinePolynomial& p) const {
        if (kind_ != Kind::Derivation) throw ConfigError("affine action only for derivations");
        if (p.n() != n_) throw ArityMismatch("polynomial arity does not match map");
        AffinePolynomial acc = affine_a_[0] * p.derivative_z();
        for (int i = 1; i <= n_; ++i) acc = acc + affine_a_[i] * p.derivative_x(i);
        // output bounds are exactly input bounds + bidegree shift; rebuild so
        // that intermediate zero factors cannot leave stale larger bounds
        AffinePolynomial out(n_, acc.field());
        for (const auto& [k, c] : acc.terms()) out.add_term(k, c);
        out.raise_bounds(p.degz_bound() + s0_ - 1, p.degx_bound() + q0_);
        return out;
    }

private:
    MapSpec() : field_(Field::rationals()) {}

    Kind kind_ = Kind::Derivation;
    int n_ = 0;
    Field field_;
    std::vector<BiPolynomial> ha_;       // derivation hA, or pullback A
    std::vector<BiPolynomial> aprime_;   // pullback A0', A1'
    std::vector<AffinePolynomial> affine_a_;
    int s0_ = 0, q0_ = 0;
    GrowthConstants growth_;
};

inline BiPolynomial apply_map(const MapSpec& phi, const BiPolynomial& q, unsigned iterations) {
    BiPolynomial out = q;
    for (unsigned k = 0; k < iterations; ++k) out = phi.apply(out);
    return out;
}

// --- growth report --------------------------------------------------------

struct LambdaSample {
    int a, b;                  // bidegree of the sampled Q
    std::size_t ord_q;         // finite ord Q(f)
    OrdValue ord_phi_q;
};

struct GrowthReport {
    GrowthConstants structural;          // exact constants from the map data
    bool needs_degx_ge1 = false;         // validity domain of the multiplicative law
    std::pair<int, int> additive_shift{0, 0};  // derivation only

    unsigned degree_samples = 0;
    unsigned degree_violations = 0;

    unsigned lambda_certified = 0;       // finite/finite ratio measured
    unsigned lambda_excluded_atleast = 0;  // ord Q(f) not finite at this precision
    unsigned lambda_below_threshold = 0;  // ord Q(f) under max(K_lambda, 1)
    unsigned lambda_bound_certified = 0; // ord phi(Q)(f) AtLeast but bound already >= lambda
    std::optional<BigRational> empirical_lambda;  // min certified ratio
    bool lambda_flagged = false;         // empirical < declared lambda
    GrowthConstants declared;
    std::vector<LambdaSample> samples;
};

namespace detail {

inline BigRational rational_pow(const BigRational& x, unsigned e) {
    BigRational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= x;
    return r;
}

// Deterministic sampler shared by growth_report; avoids std distributions.
class SampleGen {
public:
    explicit SampleGen(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    FieldScalar scalar(const Field& f) {
        if (f.is_rational()) return FieldScalar::rational(below(19) - 9, 1 + below(3));
        return FieldScalar::residue(f, next() % f.characteristic());
    }

    BiPolynomial bihom(int n, const Field& f, int a, int b) {
        auto keys = monomials_of_bidegree(n, a, b);
        BiPolynomial p(n, f);
        for (const auto& k : keys)
            if (below(2) == 0) p.add_term(k, scalar(f));
        if (p.is_zero())
            p.add_term(keys[below(static_cast<int>(keys.size()))],
                       FieldScalar::one(f));
        return p;
    }

private:
    std::uint64_t state_;
};

}  // namespace detail

// Empirical verification of the degree-growth and ord-growth laws on seeded
// random bi-homogeneous samples, plus the exact structural constants.
inline GrowthReport growth_report(const MapSpec& phi, const FunctionalPoint& F, unsigned samples,
                                  unsigned maxN, std::uint64_t seed = 1) {
    if (F.n() != phi.n()) throw ArityMismatch("point arity does not match map");
    GrowthReport rep;
    rep.structural = phi.structural_growth(phi.growth());
    rep.declared = phi.growth();
    rep.needs_degx_ge1 = phi.multiplicative_constants_need_degx();
    if (phi.kind() == MapSpec::Kind::Derivation) rep.additive_shift = phi.derivation_shift();

    const BigRational mu = rep.structural.mu, nu0 = rep.structural.nu0, nu1 = rep.structural.nu1;
    detail::SampleGen gen(seed);

    for (unsigned s = 0; s < samples; ++s) {
        int a = gen.below(3);
        int b = 1 + gen.below(2);  // deg_X >= 1 keeps the multiplicative law in its domain
        BiPolynomial q = gen.bihom(phi.n(), phi.field(), a, b);

        BiPolynomial it = q;
        for (unsigned N = 1; N <= maxN; ++N) {
            it = phi.apply(it);
            ++rep.degree_samples;
            if (it.is_zero()) break;
            BigRational bound_x = detail::rational_pow(mu, N) * b;
            BigRational geom = 0;
            for (unsigned i = 0; i < N; ++i)
                geom += detail::rational_pow(nu0, N - 1 - i) * detail::rational_pow(mu, i);
            BigRational bound_xp = detail::rational_pow(nu0, N) * a + nu1 * geom * b;
            if (BigRational(it.deg_x()) > bound_x || BigRational(it.deg_xprime()) > bound_xp)
                ++rep.degree_violations;
        }

        OrdValue oq = ord_series(evaluate(q, F));
        if (!oq.is_finite()) {
            ++rep.lambda_excluded_atleast;
            continue;
        }
        if (oq.value() < std::max<std::size_t>(phi.growth().k_lambda, 1)) {
            ++rep.lambda_below_threshold;
            continue;
        }
        OrdValue op = ord_series(evaluate(phi.apply(q), F));
        rep.samples.push_back({a, b, oq.value(), op});
        BigRational ratio(op.lower_bound(), oq.value());
        if (op.is_finite()) {
            ++rep.lambda_certified;
            if (!rep.empirical_lambda || ratio < *rep.empirical_lambda)
                rep.empirical_lambda = ratio;
        } else if (ratio >= phi.growth().lambda) {
            ++rep.lambda_bound_certified;
        } else {
            throw PrecisionExhausted(
                "ord phi(Q)(f) is AtLeast(" + std::to_string(op.value()) +
                ") with ord Q(f) = " + std::to_string(oq.value()) +
                "; the lambda ratio cannot be certified at this precision");
        }
    }
    rep.lambda_flagged = rep.empirical_lambda && *rep.empirical_lambda < phi.growth().lambda;
    return rep;
}

}  // namespace multlab
