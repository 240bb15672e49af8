#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multlab/geometry.hpp"

namespace multlab {

namespace detail {

// log2 of a positive big integer as a dyadic rational, absolute error
// <= 2^-119. Fixed-point square-and-extract with 256 working bits.
inline BigRational log2_bigint(const BigInt& v) {
    if (v <= 0) throw ConfigError("log2 of a nonpositive value");
    const unsigned P = 256, FRAC_BITS = 120;
    long e = static_cast<long>(boost::multiprecision::msb(v));  // 2^e <= v < 2^(e+1)
    BigInt x = v;
    if (e <= static_cast<long>(P))
        x <<= (P - e);
    else
        x >>= (e - P);
    // x in [2^P, 2^(P+1))
    BigInt frac_num = 0;
    for (unsigned k = 0; k < FRAC_BITS; ++k) {
        x = (x * x) >> P;
        frac_num <<= 1;
        if (x >= (BigInt(1) << (P + 1))) {
            x >>= 1;
            frac_num += 1;
        }
    }
    return BigRational(e) + BigRational(frac_num, BigInt(1) << FRAC_BITS);
}

// Absolute error of a single log2_* evaluation.
inline BigRational log2_err() { return BigRational(1, BigInt(1) << 119); }

inline BigRational log2_rational(const BigRational& v) {
    if (v <= 0) throw ConfigError("log2 of a nonpositive value");
    return log2_bigint(boost::multiprecision::numerator(v)) -
           log2_bigint(boost::multiprecision::denominator(v));
}

inline BigRational pow_rational(const BigRational& x, unsigned e) {
    BigRational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= x;
    return r;
}

inline BigInt pow_bigint(const BigInt& x, const BigInt& e) {
    if (e < 0) throw ConfigError("negative exponent");
    BigInt r = 1, base = x, k = e;
    while (k > 0) {
        if (boost::multiprecision::bit_test(k, 0)) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

}  // namespace detail

// Exact value when it fits the bit budget, else a certified approximation
// of its log2. The error bound on log2 is carried explicitly.
class BigOrLog {
public:
    static BigOrLog exact(BigRational v) {
        BigOrLog r;
        r.exact_ = true;
        r.value_ = std::move(v);
        return r;
    }

    static BigOrLog log2(BigRational log2_value, BigRational abs_err) {
        BigOrLog r;
        r.exact_ = false;
        r.log2_ = std::move(log2_value);
        r.err_ = std::move(abs_err);
        return r;
    }

    bool is_exact() const noexcept { return exact_; }

    const BigRational& exact_value() const {
        if (!exact_) throw PrecisionExhausted("value held only as log2");
        return value_;
    }

    // log2 with its stated absolute error (exact values are converted on
    // demand)
    std::pair<BigRational, BigRational> log2_value() const {
        if (!exact_) return {log2_, err_};
        return {detail::log2_rational(value_), detail::log2_err() * 2};
    }

    std::size_t bit_size() const {
        if (!exact_) return SIZE_MAX;
        return std::max(boost::multiprecision::msb(boost::multiprecision::numerator(value_) + 1),
                        boost::multiprecision::msb(boost::multiprecision::denominator(value_))) + 1;
    }

    std::string to_string() const {
        if (exact_) return value_.str();
        return "2^(" + log2_.str() + " +- " + err_.str() + ")";
    }

private:
    BigOrLog() = default;
    bool exact_ = true;
    BigRational value_ = 0;
    BigRational log2_ = 0, err_ = 0;
};

struct ConstantsBudget {
    std::size_t exact_bits = std::size_t(1) << 20;  // values above fall back to Log2
    std::size_t log_bits = std::size_t(1) << 26;    // log2 magnitudes above are an error
};

struct ExplicitConstants {
    BigInt c_n = 0;
    std::vector<BigOrLog> rho;  // rho_0 .. rho_{n+1}
    BigOrLog c_m = BigOrLog::exact(0);
    std::optional<BigRational> c_iso;
    std::optional<std::size_t> ord_wedge_f0;  // Ord(f ^ f(0)) when F was supplied
};

// c_n = 2^{n+1} (n+2)^{(n+1)(n+3)}; always exact.
inline BigInt constant_cn(unsigned n) {
    return (BigInt(1) << (n + 1)) *
           detail::pow_bigint(BigInt(n + 2), BigInt(n + 1) * BigInt(n + 3));
}

namespace detail {

// B = 6^{n+2} (n+2)^{(n+1)^2}, the prefactor of the rho recurrence and of C_m.
inline BigInt rho_prefactor(unsigned n) {
    return pow_bigint(BigInt(6), BigInt(n + 2)) *
           pow_bigint(BigInt(n + 2), BigInt(n + 1) * BigInt(n + 1));
}

// x^e for rational x and big integer e >= 0, guarded by the bit budget.
inline std::optional<BigRational> guarded_pow(const BigRational& x, const BigInt& e,
                                              std::size_t max_bits) {
    if (x == 1) return BigRational(1);
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);
    std::size_t base_bits = std::max(boost::multiprecision::msb(num < 0 ? -num : num),
                                     boost::multiprecision::msb(den)) + 1;
    if (BigInt(base_bits) * e > BigInt(max_bits)) return std::nullopt;
    BigRational r = 1, b = x;
    BigInt k = e;
    while (k > 0) {
        if (boost::multiprecision::bit_test(k, 0)) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

}  // namespace detail

// rho_0 = 0, rho_1 = 1, rho_{i+1} = B rho_i^{n+2} M^{B rho_i^{n+1}} with
// M = max(mu, nu0). The exact path runs while values fit the bit budget;
// afterwards log2(rho_{i+1}) = log2 B + (n+2) log2 rho_i + B rho_i^{n+1} log2 M
// is tracked with a certified error, which requires the exponent B rho_i^{n+1}
// itself to be exactly representable. Once even that is out of reach, the
// tower is not representable in either form and the computation refuses.
inline std::vector<BigOrLog> rho_sequence(unsigned n, const BigRational& mu, const BigRational& nu0,
                                          const ConstantsBudget& budget = {}) {
    if (n < 1) throw ConfigError("need n >= 1");
    if (mu <= 0 || nu0 <= 0) throw ConfigError("mu and nu0 must be positive");
    const BigRational M = std::max(mu, nu0);
    const BigInt B = detail::rho_prefactor(n);
    const BigRational log2M = M == 1 ? BigRational(0) : detail::log2_rational(M);
    const BigRational log2B = detail::log2_bigint(B);
    const BigRational err_budget(1, BigInt(1) << 40);

    std::vector<BigOrLog> rho;
    rho.push_back(BigOrLog::exact(0));
    rho.push_back(BigOrLog::exact(1));
    for (unsigned i = 1; i <= n; ++i) {
        const BigOrLog& cur = rho.back();
        if (!cur.is_exact())
            throw PrecisionExhausted(
                "rho_" + std::to_string(i + 1) + " needs the exact value of rho_" +
                std::to_string(i) + " in its exponent; the tower exceeds both representations");
        const BigRational& r = cur.exact_value();
        BigRational exponent = BigRational(B) * detail::pow_rational(r, n + 1);  // B rho_i^{n+1}
        std::optional<BigRational> mpow;
        if (M == 1)
            mpow = BigRational(1);
        else if (boost::multiprecision::denominator(exponent) == 1)
            mpow = detail::guarded_pow(M, boost::multiprecision::numerator(exponent),
                                       budget.exact_bits);
        if (mpow) {
            BigRational next = BigRational(B) * detail::pow_rational(r, n + 2) * *mpow;
            if (BigOrLog::exact(next).bit_size() <= budget.exact_bits) {
                rho.push_back(BigOrLog::exact(next));
                continue;
            }
        }
        // log form; for a non-integer exponent the real power is still
        // well-defined and its log2 is exactly this linear expression
        BigRational lg = log2B + BigRational(n + 2) * detail::log2_rational(r) + exponent * log2M;
        BigRational err = detail::log2_err() * (BigRational(n + 3) + exponent);
        if (err > err_budget)
            throw PrecisionExhausted("rho_" + std::to_string(i + 1) +
                                     ": exponent too large to certify log2 within 2^-40");
        rho.push_back(BigOrLog::log2(lg, err));
    }
    return rho;
}

// C_m = B rho_{n+1}^{n+1}.
inline BigOrLog constant_cm(unsigned n, const std::vector<BigOrLog>& rho,
                            const ConstantsBudget& budget = {}) {
    const BigInt B = detail::rho_prefactor(n);
    const BigOrLog& top = rho.at(n + 1);
    if (top.is_exact()) {
        BigRational v = BigRational(B) * detail::pow_rational(top.exact_value(), n + 1);
        BigOrLog e = BigOrLog::exact(v);
        if (e.bit_size() <= budget.exact_bits) return e;
        return BigOrLog::log2(detail::log2_rational(v), BigRational(1, BigInt(1) << 49));
    }
    auto [lg, err] = top.log2_value();
    return BigOrLog::log2(detail::log2_bigint(B) + BigRational(n + 1) * lg,
                          err * (n + 1) + BigRational(1, BigInt(1) << 49));
}

// Ord(f ^ f(0)): the wedge of the full representative (1, z, 1, f) with its
// value at z = 0.
inline OrdValue ord_wedge_with_value_at_zero(const FunctionalPoint& F) {
    std::vector<TruncatedSeries> x = detail::prime_factor(F);
    auto main = detail::main_factor(F);
    x.insert(x.end(), main.begin(), main.end());
    std::vector<TruncatedSeries> x0;
    for (const auto& s : x)
        x0.push_back(TruncatedSeries::constant(F.field(), s.coeff(0), F.precision()));
    return wedge_ord(x, x0);
}

// Everything the formulas need: c_n, the rho ladder, C_m, and (when a point
// is supplied) C_iso = ((c_n Ord(f ^ f(0)) + 1) / min(nu0, mu))^n.
inline ExplicitConstants explicit_constants(unsigned n, const BigRational& mu, const BigRational& nu0,
                                      const std::optional<FunctionalPoint>& F = {},
                                      const ConstantsBudget& budget = {}) {
    ExplicitConstants out;
    out.c_n = constant_cn(n);
    out.rho = rho_sequence(n, mu, nu0, budget);
    out.c_m = constant_cm(n, out.rho, budget);
    if (F) {
        OrdValue w = ord_wedge_with_value_at_zero(*F);
        if (!w.is_finite())
            throw PrecisionExhausted("Ord(f ^ f(0)) is AtLeast at this precision");
        out.ord_wedge_f0 = w.value();
        BigRational num = BigRational(out.c_n) * BigRational(w.value()) + 1;
        out.c_iso = detail::pow_rational(num / std::min(nu0, mu), n);
    }
    return out;
}

// --- threshold evaluators ---------------------------------------------------

struct TransferenceParams {
    BigRational C;
    unsigned t = 1;
    BigRational mu = 1, nu0 = 1, nu1 = 0;
    BigRational h_p = 0, deg_p = 0;  // height and degree of the polynomial
    // optional data for the two largeness conditions on C
    std::optional<unsigned> n;                     // ambient dimension, for c_n
    std::optional<BigRational> c_f;                // generator-degree constant
    std::optional<BigRational> h_pf, deg_pf;       // height/degree of the vanishing ideal
};

struct TransferenceResult {
    BigRational rhs;             // threshold the vanishing order must exceed
    std::optional<bool> c_large_1, c_large_2;
};

// C t ((nu0+mu)(h(P)+1) + (nu1+mu) deg P) mu^{t-1} (deg P + 1)^t, plus the
// two largeness conditions on C when their data is present.
inline TransferenceResult transference_threshold(const TransferenceParams& p) {
    TransferenceResult out;
    out.rhs = p.C * BigRational(p.t) *
              ((p.nu0 + p.mu) * (p.h_p + 1) + (p.nu1 + p.mu) * p.deg_p) *
              detail::pow_rational(p.mu, p.t - 1) * detail::pow_rational(p.deg_p + 1, p.t);
    if (p.c_f) {
        if (!p.n) throw MissingParam("ambient dimension n is needed for the c_n condition");
        BigRational maxv = std::max(BigRational(1), std::max(p.nu0, p.mu));
        // C >= c_n^t C_f^{t+1} max(1,nu0,mu)^{-t-1}
        out.c_large_1 = p.C * detail::pow_rational(maxv, p.t + 1) >=
                        detail::pow_rational(BigRational(constant_cn(*p.n)), p.t) *
                            detail::pow_rational(*p.c_f, p.t + 1);
    }
    if (p.h_pf && p.deg_pf) {
        BigRational inv0 = BigRational(1) / p.nu0, invm = BigRational(1) / p.mu;
        BigRational maxinv = std::max(BigRational(1), std::max(inv0, invm));
        // C >= ((h + deg) maxinv)^{1/(t+1)}  <=>  C^{t+1} >= (h + deg) maxinv
        out.c_large_2 = p.C > 0 && detail::pow_rational(p.C, p.t + 1) >= (*p.h_pf + *p.deg_pf) * maxinv;
    }
    return out;
}

// K ((mu+nu0)(deg_X' P + 1) + nu1 deg_X P) mu^{n-1} (deg_X P + 1)^t.
inline BigRational lmgp_rhs(const BigRational& K, const BigRational& mu, const BigRational& nu0,
                            const BigRational& nu1, unsigned n, unsigned t, long deg_xp,
                            long deg_x) {
    return K * ((mu + nu0) * (deg_xp + 1) + nu1 * deg_x) * detail::pow_rational(mu, n - 1) *
           detail::pow_rational(BigRational(deg_x + 1), t);
}

// K0 (deg_(0,.) q + deg_(1,.) q).
inline BigRational stability_rhs(const BigRational& K0, const BigRational& deg0,
                                 const BigRational& deg1) {
    return K0 * (deg0 + deg1);
}

// max(t / min(nu0,mu)^t, (2 rho_{n+1})^t c_n^t / (min(1,lambda)^t min(1,mu)^t))
//   * ((mu+nu0)(deg_X' P + 1) + nu1 deg_X P) mu^{t-1} (deg_X P + 1)^t
//   + (ord f)(deg_X P) + deg_X' P.
inline BigRational estimation_p(unsigned n, unsigned t, const BigRational& mu,
                                const BigRational& nu0, const BigRational& nu1,
                                const BigRational& lambda, long deg_xp, long deg_x,
                                long ord_f = 0, const ConstantsBudget& budget = {}) {
    auto rho = rho_sequence(n, mu, nu0, budget);
    if (!rho.at(n + 1).is_exact())
        throw PrecisionExhausted("rho_{n+1} exceeds the exact budget; the estimate is not "
                                 "representable as a rational");
    BigRational rho_top = rho[n + 1].exact_value();
    BigRational first = BigRational(t) / detail::pow_rational(std::min(nu0, mu), t);
    BigRational second = detail::pow_rational(2 * rho_top, t) *
                         detail::pow_rational(BigRational(constant_cn(n)), t) /
                         (detail::pow_rational(std::min(BigRational(1), lambda), t) *
                          detail::pow_rational(std::min(BigRational(1), mu), t));
    BigRational lead = std::max(first, second);
    return lead * ((mu + nu0) * (deg_xp + 1) + nu1 * deg_x) * detail::pow_rational(mu, t - 1) *
               detail::pow_rational(BigRational(deg_x + 1), t) +
           BigRational(ord_f) * deg_x + deg_xp;
}

}  // namespace multlab
