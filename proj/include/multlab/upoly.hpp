#pragma once

#include <string>
#include <utility>
#include <vector>

#include "multlab/bipoly.hpp"
#include "multlab/series.hpp"

namespace multlab {

// Dense univariate polynomial in z over an exact field. Trailing zeros are
// trimmed; the zero polynomial has an empty coefficient vector and degree -1.
class UPoly {
public:
    explicit UPoly(const Field& field) : field_(field) {}

    UPoly(const Field& field, std::vector<FieldScalar> coeffs)
        : field_(field), c_(std::move(coeffs)) {
        for (const auto& x : c_)
            if (x.field() != field_) throw FieldMismatch("polynomial coefficient field mismatch");
        trim();
    }

    static UPoly constant(const FieldScalar& c) { return UPoly(c.field(), {c}); }

    static UPoly monomial(const Field& f, std::size_t k) {
        std::vector<FieldScalar> cs(k + 1, FieldScalar::zero(f));
        cs[k] = FieldScalar::one(f);
        return UPoly(f, std::move(cs));
    }

    const Field& field() const noexcept { return field_; }
    bool is_zero() const noexcept { return c_.empty(); }
    int deg() const noexcept { return static_cast<int>(c_.size()) - 1; }

    FieldScalar coeff(std::size_t k) const {
        return k < c_.size() ? c_[k] : FieldScalar::zero(field_);
    }

    // Order of vanishing at z = 0; exact (no truncation), -1 marks the zero
    // polynomial whose ord is +infinity.
    int ord() const noexcept {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!c_[k].is_zero()) return static_cast<int>(k);
        return -1;
    }

    FieldScalar eval(const FieldScalar& x) const {
        FieldScalar acc = FieldScalar::zero(field_);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }

    FieldScalar leading() const {
        if (is_zero()) throw ZeroVector("leading coefficient of the zero polynomial");
        return c_.back();
    }

    UPoly operator-() const {
        UPoly r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        a.check(b);
        std::vector<FieldScalar> cs(std::max(a.c_.size(), b.c_.size()),
                                    FieldScalar::zero(a.field_));
        for (std::size_t k = 0; k < cs.size(); ++k) cs[k] = a.coeff(k) + b.coeff(k);
        return UPoly(a.field_, std::move(cs));
    }

    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }

    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        a.check(b);
        if (a.is_zero() || b.is_zero()) return UPoly(a.field_);
        std::vector<FieldScalar> cs(a.c_.size() + b.c_.size() - 1, FieldScalar::zero(a.field_));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) cs[i + j] += a.c_[i] * b.c_[j];
        return UPoly(a.field_, std::move(cs));
    }

    UPoly operator*(const FieldScalar& s) const {
        UPoly r = *this;
        for (auto& x : r.c_) x *= s;
        r.trim();
        return r;
    }

    // Euclidean division: returns (quotient, remainder).
    std::pair<UPoly, UPoly> divrem(const UPoly& d) const {
        check(d);
        if (d.is_zero()) throw ZeroVector("division by the zero polynomial");
        UPoly q(field_), r = *this;
        FieldScalar lead_inv = d.leading().inverse();
        while (!r.is_zero() && r.deg() >= d.deg()) {
            std::size_t shift = static_cast<std::size_t>(r.deg() - d.deg());
            FieldScalar c = r.leading() * lead_inv;
            UPoly t = UPoly::monomial(field_, shift) * c;
            q = q + t;
            r = r - t * d;
        }
        return {q, r};
    }

    // Monic gcd.
    static UPoly gcd(UPoly a, UPoly b) {
        a.check(b);
        while (!b.is_zero()) {
            UPoly r = a.divrem(b).second;
            a = std::move(b);
            b = std::move(r);
        }
        if (!a.is_zero()) a = a * a.leading().inverse();
        return a;
    }

    TruncatedSeries to_series(std::size_t precision) const {
        TruncatedSeries s(field_, precision);
        for (std::size_t k = 0; k < c_.size() && k < precision; ++k) s.coeff(k) = c_[k];
        return s;
    }

    UPoly to_field(const Field& f) const {
        std::vector<FieldScalar> cs;
        cs.reserve(c_.size());
        for (const auto& x : c_) cs.push_back(FieldScalar::from_rational_mod(f, x.rational_value()));
        return UPoly(f, std::move(cs));
    }

    bool operator==(const UPoly& o) const { return field_ == o.field_ && c_ == o.c_; }
    bool operator!=(const UPoly& o) const { return !(*this == o); }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t k = c_.size(); k-- > 0;) {
            if (c_[k].is_zero()) continue;
            std::string term = c_[k].to_string();
            if (k > 0) {
                if (term == "1") term.clear();
                else if (term == "-1") term = "-";
                else term += "*";
                term += "z";
                if (k > 1) term += "^" + std::to_string(k);
            }
            if (out.empty())
                out = term;
            else if (term[0] == '-')
                out += " - " + term.substr(1);
            else
                out += " + " + term;
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    void check(const UPoly& o) const {
        if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
    }

    Field field_;
    std::vector<FieldScalar> c_;
};

inline UPoly parse_upoly(const std::string& text, const Field& field = Field::rationals()) {
    AffinePolynomial p = parse_affine(text, 0, field);
    std::vector<FieldScalar> cs(static_cast<std::size_t>(p.deg_z()) + 1, FieldScalar::zero(field));
    for (const auto& [k, c] : p.terms()) cs[k[0]] = c;
    return UPoly(field, std::move(cs));
}

// Rational fraction num/den given as "z^2" or "z^2/(1-z)". The slash splits
// only when not followed by a digit, so scalar fractions like 3/4 pass
// through to the polynomial parser.
inline std::pair<UPoly, UPoly> parse_rational_function(const std::string& text,
                                                       const Field& field = Field::rationals()) {
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (ch == '(') ++depth;
        else if (ch == ')') --depth;
        else if (ch == '/' && depth == 0) {
            std::size_t j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && !std::isdigit(static_cast<unsigned char>(text[j])))
                return {parse_upoly(text.substr(0, i), field), parse_upoly(text.substr(i + 1), field)};
        }
    }
    return {parse_upoly(text, field), UPoly::constant(FieldScalar::one(field))};
}

}  // namespace multlab
