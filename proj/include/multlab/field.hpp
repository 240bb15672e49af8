#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <string>

#include "multlab/errors.hpp"

namespace multlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Field descriptor: characteristic 0 means the rationals, a prime p means F_p.
class Field {
public:
    static Field rationals() { return Field(0); }

    static Field prime(std::uint64_t p) {
        if (!is_prime(p))
            throw ConfigError("field characteristic " + std::to_string(p) + " is not prime");
        return Field(p);
    }

    std::uint64_t characteristic() const noexcept { return p_; }
    bool is_rational() const noexcept { return p_ == 0; }

    bool operator==(const Field& other) const noexcept { return p_ == other.p_; }
    bool operator!=(const Field& other) const noexcept { return p_ != other.p_; }

    std::string name() const {
        return is_rational() ? std::string("Q") : "F" + std::to_string(p_);
    }

    static bool is_prime(std::uint64_t p) {
        if (p < 2) return false;
        if (p % 2 == 0) return p == 2;
        for (std::uint64_t d = 3; d * d <= p; d += 2)
            if (p % d == 0) return false;
        return true;
    }

private:
    explicit Field(std::uint64_t p) : p_(p) {}
    std::uint64_t p_;
};

namespace detail {

inline std::uint64_t mod_add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;  // p < 2^63 so no overflow
    return s >= p ? s - p : s;
}

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    while (e) {
        if (e & 1) r = mod_mul(r, a, p);
        a = mod_mul(a, a, p);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
    if (a == 0) throw Error("DivisionByZero", "inverse of 0 in F_" + std::to_string(p));
    return mod_pow(a, p - 2, p);
}

}  // namespace detail

// Exact scalar in Q (lowest terms, positive denominator, maintained by
// cpp_rational) or in F_p (residue in [0, p)). Arithmetic between scalars of
// different fields throws FieldMismatch; there is no implicit coercion.
class FieldScalar {
public:
    FieldScalar() : field_(Field::rationals()), q_(0), r_(0) {}

    FieldScalar(const Field& field, BigRational value) : field_(field), q_(0), r_(0) {
        if (field_.is_rational()) {
            q_ = std::move(value);
        } else {
            *this = from_rational_mod(field, value);
        }
    }

    static FieldScalar zero(const Field& field) { return FieldScalar(field, 0, true); }
    static FieldScalar one(const Field& field) { return FieldScalar(field, 1, true); }

    static FieldScalar rational(BigRational q) {
        FieldScalar s;
        s.q_ = std::move(q);
        return s;
    }

    static FieldScalar rational(long num, long den = 1) {
        if (den < 0) { num = -num; den = -den; }
        return rational(BigRational(num, den));
    }

    static FieldScalar residue(const Field& field, std::uint64_t r) {
        if (field.is_rational())
            throw FieldMismatch("residue constructor needs a prime field");
        FieldScalar s;
        s.field_ = field;
        s.r_ = r % field.characteristic();
        return s;
    }

    // Reduce a rational a/b mod p; throws FieldMismatch when p | b.
    static FieldScalar from_rational_mod(const Field& field, const BigRational& q) {
        if (field.is_rational()) return rational(q);
        const std::uint64_t p = field.characteristic();
        BigInt num = boost::multiprecision::numerator(q) % p;
        BigInt den = boost::multiprecision::denominator(q) % p;
        if (den == 0)
            throw FieldMismatch("denominator of " + q.str() + " vanishes mod " + std::to_string(p));
        if (num < 0) num += p;
        std::uint64_t n = num.convert_to<std::uint64_t>();
        std::uint64_t d = den.convert_to<std::uint64_t>();
        return residue(field, detail::mod_mul(n, detail::mod_inv(d, p), p));
    }

    const Field& field() const noexcept { return field_; }

    bool is_zero() const noexcept {
        return field_.is_rational() ? q_.is_zero() : r_ == 0;
    }

    const BigRational& rational_value() const {
        if (!field_.is_rational()) throw FieldMismatch("not a rational scalar");
        return q_;
    }

    std::uint64_t residue_value() const {
        if (field_.is_rational()) throw FieldMismatch("not a prime-field scalar");
        return r_;
    }

    FieldScalar operator-() const {
        FieldScalar s(*this);
        if (field_.is_rational())
            s.q_ = -q_;
        else if (r_ != 0)
            s.r_ = field_.characteristic() - r_;
        return s;
    }

    FieldScalar& operator+=(const FieldScalar& o) {
        check_field(o);
        if (field_.is_rational())
            q_ += o.q_;
        else
            r_ = detail::mod_add(r_, o.r_, field_.characteristic());
        return *this;
    }

    FieldScalar& operator-=(const FieldScalar& o) { return *this += -o; }

    FieldScalar& operator*=(const FieldScalar& o) {
        check_field(o);
        if (field_.is_rational())
            q_ *= o.q_;
        else
            r_ = detail::mod_mul(r_, o.r_, field_.characteristic());
        return *this;
    }

    FieldScalar& operator/=(const FieldScalar& o) {
        check_field(o);
        if (o.is_zero()) throw Error("DivisionByZero", "division by zero scalar");
        if (field_.is_rational())
            q_ /= o.q_;
        else
            r_ = detail::mod_mul(r_, detail::mod_inv(o.r_, field_.characteristic()),
                                 field_.characteristic());
        return *this;
    }

    FieldScalar inverse() const {
        FieldScalar one_ = one(field_);
        one_ /= *this;
        return one_;
    }

    friend FieldScalar operator+(FieldScalar a, const FieldScalar& b) { return a += b; }
    friend FieldScalar operator-(FieldScalar a, const FieldScalar& b) { return a -= b; }
    friend FieldScalar operator*(FieldScalar a, const FieldScalar& b) { return a *= b; }
    friend FieldScalar operator/(FieldScalar a, const FieldScalar& b) { return a /= b; }

    bool operator==(const FieldScalar& o) const {
        check_field(o);
        return field_.is_rational() ? q_ == o.q_ : r_ == o.r_;
    }
    bool operator!=(const FieldScalar& o) const { return !(*this == o); }

    // "3/2", "-1" over Q; "4 mod 7" over F_7.
    std::string to_string() const {
        if (field_.is_rational()) return q_.str();
        return std::to_string(r_) + " mod " + std::to_string(field_.characteristic());
    }

    friend std::ostream& operator<<(std::ostream& os, const FieldScalar& s) {
        return os << s.to_string();
    }

    void check_field(const FieldScalar& o) const {
        if (field_ != o.field_)
            throw FieldMismatch("mixing scalars from " + field_.name() + " and " + o.field_.name());
    }

private:
    FieldScalar(const Field& field, std::uint64_t small, bool)
        : field_(field), q_(0), r_(0) {
        if (field_.is_rational())
            q_ = small;
        else
            r_ = small % field_.characteristic();
    }

    Field field_;
    BigRational q_;     // characteristic 0
    std::uint64_t r_;   // characteristic p
};

// Parses "3/2", "-7" or "4 mod 7". The field argument fixes the target field;
// rational literals are reduced into F_p when the field is prime.
inline FieldScalar parse_scalar(const Field& field, const std::string& text) {
    auto mod_pos = text.find(" mod ");
    if (mod_pos != std::string::npos) {
        std::uint64_t p = std::stoull(text.substr(mod_pos + 5));
        if (field.is_rational() || field.characteristic() != p)
            throw FieldMismatch("scalar '" + text + "' does not live in " + field.name());
        BigInt n(text.substr(0, mod_pos));
        BigInt r = n % p;
        if (r < 0) r += p;
        return FieldScalar::residue(field, r.convert_to<std::uint64_t>());
    }
    try {
        return FieldScalar::from_rational_mod(field, BigRational(text));
    } catch (const std::exception& e) {
        if (dynamic_cast<const Error*>(&e)) throw;
        throw ParseError("bad scalar literal '" + text + "'");
    }
}

}  // namespace multlab
