#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "multlab/field.hpp"

namespace multlab {

// Order of vanishing of a truncated series. Finite(k) certifies coefficient k
// is the first nonzero one; AtLeast(N) certifies every coefficient below N
// vanishes (truncation cannot tell ord >= N from identical vanishing).
class OrdValue {
public:
    static OrdValue finite(std::size_t k) { return OrdValue(k, true); }
    static OrdValue at_least(std::size_t n) { return OrdValue(n, false); }

    bool is_finite() const noexcept { return finite_; }
    std::size_t value() const noexcept { return k_; }  // ord if finite, else the bound

    // Certified lower bound in both cases.
    std::size_t lower_bound() const noexcept { return k_; }

    bool operator==(const OrdValue& o) const noexcept {
        return finite_ == o.finite_ && k_ == o.k_;
    }
    bool operator!=(const OrdValue& o) const noexcept { return !(*this == o); }

    std::string to_string() const {
        return (finite_ ? "Finite(" : "AtLeast(") + std::to_string(k_) + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, const OrdValue& v) {
        return os << v.to_string();
    }

private:
    OrdValue(std::size_t k, bool finite) : k_(k), finite_(finite) {}
    std::size_t k_;
    bool finite_;
};

// Certified minimum of a set of OrdValues: Finite(k) only when k undercuts
// every AtLeast bound in the set, otherwise the best sound lower bound.
inline OrdValue ord_min(const std::vector<OrdValue>& vals) {
    bool have_finite = false;
    std::size_t min_finite = 0, min_bound = SIZE_MAX;
    for (const auto& v : vals) {
        if (v.is_finite()) {
            if (!have_finite || v.value() < min_finite) min_finite = v.value();
            have_finite = true;
        } else {
            min_bound = std::min(min_bound, v.value());
        }
    }
    if (have_finite && min_finite < min_bound) return OrdValue::finite(min_finite);
    if (min_bound == SIZE_MAX) return OrdValue::finite(min_finite);
    return OrdValue::at_least(std::min(min_bound, have_finite ? min_finite : min_bound));
}

// Formal power series known modulo z^N, coefficients indexed 0..N-1.
class TruncatedSeries {
public:
    TruncatedSeries(const Field& field, std::size_t precision)
        : field_(field), coeffs_(check_precision(precision), FieldScalar::zero(field)) {}

    TruncatedSeries(const Field& field, std::vector<FieldScalar> coeffs)
        : field_(field), coeffs_(std::move(coeffs)) {
        check_precision(coeffs_.size());
        for (const auto& c : coeffs_)
            if (c.field() != field_) throw FieldMismatch("series coefficient field mismatch");
    }

    static TruncatedSeries constant(const Field& field, const FieldScalar& c, std::size_t precision) {
        TruncatedSeries s(field, precision);
        s.coeffs_[0] = c;
        return s;
    }

    static TruncatedSeries identity(const Field& field, std::size_t precision) {
        TruncatedSeries s(field, precision);
        if (precision > 1) s.coeffs_[1] = FieldScalar::one(field);
        return s;
    }

    static TruncatedSeries monomial(const Field& field, std::size_t k, std::size_t precision) {
        TruncatedSeries s(field, precision);
        if (k < precision) s.coeffs_[k] = FieldScalar::one(field);
        return s;
    }

    const Field& field() const noexcept { return field_; }
    std::size_t precision() const noexcept { return coeffs_.size(); }
    const FieldScalar& coeff(std::size_t k) const { return coeffs_.at(k); }
    FieldScalar& coeff(std::size_t k) { return coeffs_.at(k); }
    const std::vector<FieldScalar>& coeffs() const noexcept { return coeffs_; }

    TruncatedSeries truncated(std::size_t precision) const {
        precision = std::min(precision, coeffs_.size());
        return TruncatedSeries(field_,
                               std::vector<FieldScalar>(coeffs_.begin(), coeffs_.begin() + precision));
    }

    bool known_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries s(*this);
        for (auto& c : s.coeffs_) c = -c;
        return s;
    }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
        return binop(a, b, false);
    }
    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
        return binop(a, b, true);
    }

    TruncatedSeries operator*(const FieldScalar& c) const {
        TruncatedSeries s(*this);
        for (auto& x : s.coeffs_) x *= c;
        return s;
    }

    // Comparison on the shared known prefix.
    bool agrees_with(const TruncatedSeries& o) const {
        std::size_t n = std::min(precision(), o.precision());
        for (std::size_t k = 0; k < n; ++k)
            if (coeffs_[k] != o.coeffs_[k]) return false;
        return true;
    }

    bool operator==(const TruncatedSeries& o) const {
        return precision() == o.precision() && agrees_with(o);
    }

private:
    static std::size_t check_precision(std::size_t n) {
        if (n < 1) throw ConfigError("series precision must be >= 1");
        return n;
    }

    static TruncatedSeries binop(const TruncatedSeries& a, const TruncatedSeries& b, bool sub) {
        if (a.field_ != b.field_) throw FieldMismatch("series over different fields");
        std::size_t n = std::min(a.precision(), b.precision());
        TruncatedSeries s(a.field_, n);
        for (std::size_t k = 0; k < n; ++k)
            s.coeffs_[k] = sub ? a.coeffs_[k] - b.coeffs_[k] : a.coeffs_[k] + b.coeffs_[k];
        return s;
    }

    Field field_;
    std::vector<FieldScalar> coeffs_;
};

inline OrdValue ord_series(const TruncatedSeries& a) {
    for (std::size_t k = 0; k < a.precision(); ++k)
        if (!a.coeff(k).is_zero()) return OrdValue::finite(k);
    return OrdValue::at_least(a.precision());
}

// Product truncated to the minimum precision of the operands.
inline TruncatedSeries mul_series(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.field() != b.field()) throw FieldMismatch("series over different fields");
    std::size_t n = std::min(a.precision(), b.precision());
    TruncatedSeries s(a.field(), n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a.coeff(i).is_zero()) continue;
        for (std::size_t j = 0; i + j < n; ++j) {
            if (b.coeff(j).is_zero()) continue;
            s.coeff(i + j) += a.coeff(i) * b.coeff(j);
        }
    }
    return s;
}

inline TruncatedSeries mul_series(const TruncatedSeries& a, const TruncatedSeries& b,
                                  std::size_t precision) {
    return mul_series(a.truncated(precision), b.truncated(precision));
}

// a(g(z)) for ord(g) >= 1, truncated to min(N_a * ord(g), N_g): beyond the
// first bound the unknown tail of a contributes through g^{N_a}, beyond the
// second the unknown tail of g leaks into every power g^k, k >= 1.
inline TruncatedSeries compose_series(const TruncatedSeries& a, const TruncatedSeries& g) {
    if (a.field() != g.field()) throw FieldMismatch("series over different fields");
    OrdValue og = ord_series(g);
    std::size_t v = og.lower_bound();
    if (og.is_finite() && v == 0)
        throw InnerNotPositiveValuation("inner series has nonzero constant term");
    // og AtLeast(Ng): g vanishes to the whole known precision, v = Ng >= 1.

    std::size_t ng = g.precision();
    std::size_t result_prec = std::min(a.precision() * v, ng);

    // Horner over the coefficients of a that can reach order < result_prec.
    std::size_t top = (result_prec - 1) / v;  // a_k with k > top contributes >= result_prec
    top = std::min(top, a.precision() - 1);
    TruncatedSeries gt = g.truncated(result_prec);
    TruncatedSeries r = TruncatedSeries::constant(a.field(), a.coeff(top), result_prec);
    for (std::size_t k = top; k-- > 0;) {
        r = mul_series(r, gt);
        r.coeff(0) += a.coeff(k);
    }
    return r;
}

// Formal derivative; precision drops by one (clamped at 1).
inline TruncatedSeries derive_series(const TruncatedSeries& a) {
    std::size_t n = a.precision() > 1 ? a.precision() - 1 : 1;
    TruncatedSeries s(a.field(), n);
    for (std::size_t k = 1; k < a.precision(); ++k) {
        FieldScalar factor = a.field().is_rational()
                                 ? FieldScalar::rational(static_cast<long>(k))
                                 : FieldScalar::from_rational_mod(a.field(), BigRational(k));
        if (k - 1 < n) s.coeff(k - 1) = a.coeff(k) * factor;
    }
    return s;
}

// Multiplicative inverse of a series with nonzero constant term.
inline TruncatedSeries invert_series(const TruncatedSeries& a) {
    if (a.coeff(0).is_zero())
        throw InnerNotPositiveValuation("cannot invert a series with zero constant term");
    std::size_t n = a.precision();
    TruncatedSeries r(a.field(), n);
    FieldScalar c0inv = a.coeff(0).inverse();
    r.coeff(0) = c0inv;
    for (std::size_t k = 1; k < n; ++k) {
        FieldScalar acc = FieldScalar::zero(a.field());
        for (std::size_t j = 1; j <= k; ++j) acc += a.coeff(j) * r.coeff(k - j);
        r.coeff(k) = -(acc * c0inv);
    }
    return r;
}

inline TruncatedSeries pow_series(const TruncatedSeries& a, std::size_t e) {
    TruncatedSeries r = TruncatedSeries::constant(a.field(), FieldScalar::one(a.field()),
                                                  a.precision());
    TruncatedSeries base = a;
    while (e) {
        if (e & 1) r = mul_series(r, base);
        base = mul_series(base, base);
        e >>= 1;
    }
    return r;
}

}  // namespace multlab
