#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multlab/series.hpp"

namespace multlab {

namespace detail {

inline void accumulate_term(std::map<std::vector<int>, FieldScalar>& terms,
                            const std::vector<int>& key, const FieldScalar& c) {
    if (c.is_zero()) return;
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

}  // namespace detail

// Bi-homogeneous (or general) polynomial in k[X0',X1'][X0,...,Xn].
// Exponent keys are [e0', e1', e0, e1, ..., en]; only nonzero coefficients
// are stored.
class BiPolynomial {
public:
    BiPolynomial(int n, const Field& field) : n_(n), field_(field) {}

    int n() const noexcept { return n_; }
    const Field& field() const noexcept { return field_; }
    const std::map<std::vector<int>, FieldScalar>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t key_size() const noexcept { return static_cast<std::size_t>(n_) + 3; }

    void add_term(const std::vector<int>& key, const FieldScalar& c) {
        if (key.size() != key_size()) throw ArityMismatch("exponent tuple length mismatch");
        if (c.field() != field_) throw FieldMismatch("coefficient field mismatch");
        detail::accumulate_term(terms_, key, c);
    }

    static BiPolynomial monomial(int n, const Field& field, const std::vector<int>& key) {
        BiPolynomial p(n, field);
        p.add_term(key, FieldScalar::one(field));
        return p;
    }

    int deg_xprime() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k[0] + k[1]);
        return d;
    }

    int deg_x() const {
        int d = 0;
        for (const auto& [k, c] : terms_) {
            int s = 0;
            for (std::size_t i = 2; i < k.size(); ++i) s += k[i];
            d = std::max(d, s);
        }
        return d;
    }

    bool is_bihomogeneous() const {
        if (terms_.empty()) return true;
        int a = -1, b = -1;
        for (const auto& [k, c] : terms_) {
            int ka = k[0] + k[1], kb = 0;
            for (std::size_t i = 2; i < k.size(); ++i) kb += k[i];
            if (a < 0) { a = ka; b = kb; }
            else if (ka != a || kb != b) return false;
        }
        return true;
    }

    // (deg_X', deg_X); requires a bi-homogeneous polynomial.
    std::pair<int, int> bidegree() const {
        if (!is_bihomogeneous()) throw NotBiHomogeneous("bidegree of a non-bi-homogeneous polynomial");
        return {deg_xprime(), deg_x()};
    }

    BiPolynomial operator-() const {
        BiPolynomial r(n_, field_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }

    friend BiPolynomial operator+(const BiPolynomial& a, const BiPolynomial& b) {
        a.check_compatible(b);
        BiPolynomial r = a;
        for (const auto& [k, c] : b.terms_) detail::accumulate_term(r.terms_, k, c);
        return r;
    }

    friend BiPolynomial operator-(const BiPolynomial& a, const BiPolynomial& b) {
        return a + (-b);
    }

    friend BiPolynomial operator*(const BiPolynomial& a, const BiPolynomial& b) {
        a.check_compatible(b);
        BiPolynomial r(a.n_, a.field_);
        std::vector<int> key(a.key_size());
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                for (std::size_t i = 0; i < key.size(); ++i) key[i] = ka[i] + kb[i];
                detail::accumulate_term(r.terms_, key, ca * cb);
            }
        return r;
    }

    BiPolynomial operator*(const FieldScalar& c) const {
        BiPolynomial r(n_, field_);
        for (const auto& [k, coef] : terms_) detail::accumulate_term(r.terms_, k, coef * c);
        return r;
    }

    BiPolynomial pow(int e) const {
        BiPolynomial r = monomial(n_, field_, std::vector<int>(key_size(), 0));
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    // Partial derivative; var indexes the exponent tuple (0 = X0', 1 = X1',
    // 2 = X0, 2+i = Xi).
    BiPolynomial derivative(std::size_t var) const {
        BiPolynomial r(n_, field_);
        for (const auto& [k, c] : terms_) {
            if (k[var] == 0) continue;
            std::vector<int> key = k;
            --key[var];
            FieldScalar factor = field_.is_rational()
                                     ? FieldScalar::rational(k[var])
                                     : FieldScalar::from_rational_mod(field_, BigRational(k[var]));
            detail::accumulate_term(r.terms_, key, c * factor);
        }
        return r;
    }

    // Substitute X0' -> s0p, X1' -> s1p, Xi -> sx[i] (i = 0..n). All
    // substituted polynomials must share this arity and field.
    BiPolynomial substitute(const BiPolynomial& s0p, const BiPolynomial& s1p,
                            const std::vector<BiPolynomial>& sx) const {
        if (static_cast<int>(sx.size()) != n_ + 1)
            throw ArityMismatch("substitution needs n+1 polynomials for the X group");
        BiPolynomial r(n_, field_);
        for (const auto& [k, c] : terms_) {
            BiPolynomial t = monomial(n_, field_, std::vector<int>(key_size(), 0)) * c;
            if (k[0]) t = t * s0p.pow(k[0]);
            if (k[1]) t = t * s1p.pow(k[1]);
            for (int i = 0; i <= n_; ++i)
                if (k[2 + i]) t = t * sx[i].pow(k[2 + i]);
            r = r + t;
        }
        return r;
    }

    BiPolynomial to_field(const Field& f) const {
        BiPolynomial r(n_, f);
        for (const auto& [k, c] : terms_)
            r.add_term(k, FieldScalar::from_rational_mod(f, c.rational_value()));
        return r;
    }

    bool operator==(const BiPolynomial& o) const {
        return n_ == o.n_ && field_ == o.field_ && terms_ == o.terms_;
    }
    bool operator!=(const BiPolynomial& o) const { return !(*this == o); }

    std::string to_string() const;

    void check_compatible(const BiPolynomial& o) const {
        if (n_ != o.n_) throw ArityMismatch("polynomials with different variable counts");
        if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
    }

private:
    int n_;
    Field field_;
    std::map<std::vector<int>, FieldScalar> terms_;
};

// Polynomial in k[z][X1,...,Xn] with declared degree bounds. The bounds
// drive bi-homogenization: hP = X0'^degz X0^degx P(X1'/X0', X/X0), so they
// are part of the value, not just metadata. Fresh polynomials get their
// actual degrees as bounds.
class AffinePolynomial {
public:
    AffinePolynomial(int n, const Field& field)
        : n_(n), field_(field), degz_bound_(0), degx_bound_(0) {}

    int n() const noexcept { return n_; }
    const Field& field() const noexcept { return field_; }
    const std::map<std::vector<int>, FieldScalar>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t key_size() const noexcept { return static_cast<std::size_t>(n_) + 1; }

    void add_term(const std::vector<int>& key, const FieldScalar& c) {
        if (key.size() != key_size()) throw ArityMismatch("exponent tuple length mismatch");
        if (c.field() != field_) throw FieldMismatch("coefficient field mismatch");
        detail::accumulate_term(terms_, key, c);
        degz_bound_ = std::max(degz_bound_, deg_z());
        degx_bound_ = std::max(degx_bound_, deg_x());
    }

    int deg_z() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k[0]);
        return d;
    }

    int deg_x() const {
        int d = 0;
        for (const auto& [k, c] : terms_) {
            int s = 0;
            for (std::size_t i = 1; i < k.size(); ++i) s += k[i];
            d = std::max(d, s);
        }
        return d;
    }

    int degz_bound() const noexcept { return degz_bound_; }
    int degx_bound() const noexcept { return degx_bound_; }

    void raise_bounds(int degz, int degx) {
        degz_bound_ = std::max(degz_bound_, degz);
        degx_bound_ = std::max(degx_bound_, degx);
    }

    // Functional height convention: h(P) = deg_z P.
    int height() const { return deg_z(); }

    AffinePolynomial operator-() const {
        AffinePolynomial r(n_, field_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        r.raise_bounds(degz_bound_, degx_bound_);
        return r;
    }

    friend AffinePolynomial operator+(const AffinePolynomial& a, const AffinePolynomial& b) {
        a.check_compatible(b);
        AffinePolynomial r = a;
        for (const auto& [k, c] : b.terms_) detail::accumulate_term(r.terms_, k, c);
        r.raise_bounds(b.degz_bound_, b.degx_bound_);
        return r;
    }

    friend AffinePolynomial operator-(const AffinePolynomial& a, const AffinePolynomial& b) {
        return a + (-b);
    }

    friend AffinePolynomial operator*(const AffinePolynomial& a, const AffinePolynomial& b) {
        a.check_compatible(b);
        AffinePolynomial r(a.n_, a.field_);
        std::vector<int> key(a.key_size());
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                for (std::size_t i = 0; i < key.size(); ++i) key[i] = ka[i] + kb[i];
                detail::accumulate_term(r.terms_, key, ca * cb);
            }
        r.raise_bounds(a.degz_bound_ + b.degz_bound_, a.degx_bound_ + b.degx_bound_);
        return r;
    }

    // d/dz and d/dXi.
    AffinePolynomial derivative_z() const { return derivative_impl(0, degz_bound_ > 0 ? degz_bound_ - 1 : 0, degx_bound_); }
    AffinePolynomial derivative_x(int i) const { return derivative_impl(i, degz_bound_, degx_bound_ > 0 ? degx_bound_ - 1 : 0); }

    // Exact evaluation at scalar arguments (z = zval, Xi = xvals[i-1]).
    FieldScalar eval_scalar(const FieldScalar& zval, const std::vector<FieldScalar>& xvals) const {
        if (static_cast<int>(xvals.size()) != n_) throw ArityMismatch("need n scalar values");
        FieldScalar acc = FieldScalar::zero(field_);
        for (const auto& [k, c] : terms_) {
            FieldScalar t = c;
            for (int e = 0; e < k[0]; ++e) t *= zval;
            for (int i = 0; i < n_; ++i)
                for (int e = 0; e < k[1 + i]; ++e) t *= xvals[i];
            acc += t;
        }
        return acc;
    }

    AffinePolynomial to_field(const Field& f) const {
        AffinePolynomial r(n_, f);
        for (const auto& [k, c] : terms_)
            r.add_term(k, FieldScalar::from_rational_mod(f, c.rational_value()));
        r.raise_bounds(degz_bound_, degx_bound_);
        return r;
    }

    bool operator==(const AffinePolynomial& o) const {
        return n_ == o.n_ && field_ == o.field_ && terms_ == o.terms_;
    }
    bool operator!=(const AffinePolynomial& o) const { return !(*this == o); }

    std::string to_string() const;

    void check_compatible(const AffinePolynomial& o) const {
        if (n_ != o.n_) throw ArityMismatch("polynomials with different variable counts");
        if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
    }

private:
    AffinePolynomial derivative_impl(int var, int bz, int bx) const {
        AffinePolynomial r(n_, field_);
        for (const auto& [k, c] : terms_) {
            if (k[var] == 0) continue;
            std::vector<int> key = k;
            --key[var];
            FieldScalar factor = field_.is_rational()
                                     ? FieldScalar::rational(k[var])
                                     : FieldScalar::from_rational_mod(field_, BigRational(k[var]));
            detail::accumulate_term(r.terms_, key, c * factor);
        }
        r.raise_bounds(bz, bx);
        return r;
    }

    int n_;
    Field field_;
    std::map<std::vector<int>, FieldScalar> terms_;
    int degz_bound_, degx_bound_;
};

// The point (1, z, 1, f1(z), ..., fn(z)) with all fi sharing one field and
// one precision. The coordinate vector has ord 0 by construction.
class FunctionalPoint {
public:
    FunctionalPoint(std::vector<TruncatedSeries> fs, std::optional<unsigned> declared_tf = {})
        : fs_(std::move(fs)), tf_(declared_tf) {
        if (fs_.empty()) throw ArityMismatch("functional point needs at least one coordinate series");
        for (const auto& f : fs_) {
            if (f.field() != fs_.front().field())
                throw FieldMismatch("functional point coordinates over different fields");
            if (f.precision() != fs_.front().precision())
                throw ConfigError("functional point coordinates at different precisions");
        }
    }

    int n() const noexcept { return static_cast<int>(fs_.size()); }
    const Field& field() const noexcept { return fs_.front().field(); }
    std::size_t precision() const noexcept { return fs_.front().precision(); }
    const TruncatedSeries& f(int i) const { return fs_.at(i - 1); }  // 1-based, as in f_i
    const std::vector<TruncatedSeries>& series() const noexcept { return fs_; }
    std::optional<unsigned> declared_tf() const noexcept { return tf_; }

    FunctionalPoint truncated(std::size_t precision) const {
        std::vector<TruncatedSeries> fs;
        fs.reserve(fs_.size());
        for (const auto& f : fs_) fs.push_back(f.truncated(precision));
        return FunctionalPoint(std::move(fs), tf_);
    }

    // Reduce a rational point mod p (for finite-field oracles).
    FunctionalPoint to_field(const Field& target) const {
        std::vector<TruncatedSeries> fs;
        for (const auto& f : fs_) {
            std::vector<FieldScalar> cs;
            cs.reserve(f.precision());
            for (const auto& c : f.coeffs())
                cs.push_back(FieldScalar::from_rational_mod(target, c.rational_value()));
            fs.emplace_back(target, std::move(cs));
        }
        return FunctionalPoint(std::move(fs), tf_);
    }

private:
    std::vector<TruncatedSeries> fs_;
    std::optional<unsigned> tf_;
};

// --- evaluation ---------------------------------------------------------

namespace detail {

inline TruncatedSeries shift_series(const TruncatedSeries& s, int k) {
    TruncatedSeries r(s.field(), s.precision());
    for (std::size_t j = 0; j + k < s.precision(); ++j) r.coeff(j + k) = s.coeff(j);
    return r;
}

inline AffinePolynomial coerce_affine(const AffinePolynomial& p, const Field& f) {
    if (p.field() == f) return p;
    if (p.field().is_rational()) return p.to_field(f);
    throw FieldMismatch("cannot embed " + p.field().name() + " into " + f.name());
}

}  // namespace detail

// P(1, z, 1, f1, ..., fn) as an exact truncated series at F's precision.
inline TruncatedSeries evaluate(const AffinePolynomial& p, const FunctionalPoint& F) {
    if (p.n() != F.n()) throw ArityMismatch("polynomial arity does not match point");
    AffinePolynomial q = detail::coerce_affine(p, F.field());
    std::size_t N = F.precision();
    const Field& fld = F.field();

    // Powers of each coordinate, computed once to the needed exponent.
    std::vector<int> max_exp(q.n(), 0);
    for (const auto& [k, c] : q.terms())
        for (int i = 0; i < q.n(); ++i) max_exp[i] = std::max(max_exp[i], k[1 + i]);
    std::vector<std::vector<TruncatedSeries>> pow(q.n());
    for (int i = 0; i < q.n(); ++i) {
        pow[i].push_back(TruncatedSeries::constant(fld, FieldScalar::one(fld), N));
        for (int e = 1; e <= max_exp[i]; ++e) pow[i].push_back(mul_series(pow[i].back(), F.f(i + 1)));
    }

    TruncatedSeries acc(fld, N);
    for (const auto& [k, c] : q.terms()) {
        TruncatedSeries t = TruncatedSeries::constant(fld, c, N);
        for (int i = 0; i < q.n(); ++i)
            if (k[1 + i]) t = mul_series(t, pow[i][k[1 + i]]);
        if (k[0]) {
            if (static_cast<std::size_t>(k[0]) >= N) continue;  // z^e beyond precision
            t = detail::shift_series(t, k[0]);
        }
        acc = acc + t;
    }
    return acc;
}

// Substitute the affine representative (X0', X1', X0) = (1, z, 1).
inline AffinePolynomial dehomogenize(const BiPolynomial& p) {
    std::map<std::vector<int>, FieldScalar> collapsed;
    std::vector<int> key(static_cast<std::size_t>(p.n()) + 1);
    for (const auto& [k, c] : p.terms()) {
        key[0] = k[1];
        for (int i = 0; i < p.n(); ++i) key[1 + i] = k[3 + i];
        detail::accumulate_term(collapsed, key, c);
    }
    AffinePolynomial out(p.n(), p.field());
    for (const auto& [k, c] : collapsed) out.add_term(k, c);
    return out;
}

inline TruncatedSeries evaluate(const BiPolynomial& p, const FunctionalPoint& F) {
    if (p.n() != F.n()) throw ArityMismatch("polynomial arity does not match point");
    return evaluate(dehomogenize(p), F);
}

// hP = X0'^degz X0^degx P(X1'/X0', X1/X0, ..., Xn/X0), taken at the declared
// bounds, so the result has bidegree exactly (degz_bound, degx_bound).
// Dehomogenizing at (1, z, 1) recovers P.
inline BiPolynomial bihomogenize(const AffinePolynomial& p) {
    BiPolynomial r(p.n(), p.field());
    std::vector<int> key(static_cast<std::size_t>(p.n()) + 3);
    for (const auto& [k, c] : p.terms()) {
        int xdeg = 0;
        for (int i = 0; i < p.n(); ++i) xdeg += k[1 + i];
        key[0] = p.degz_bound() - k[0];
        key[1] = k[0];
        key[2] = p.degx_bound() - xdeg;
        for (int i = 0; i < p.n(); ++i) key[3 + i] = k[1 + i];
        r.add_term(key, c);
    }
    return r;
}

// Homogenize to an explicit target bidegree (must dominate the bounds).
inline BiPolynomial bihomogenize(AffinePolynomial p, int degz, int degx) {
    if (degz < p.deg_z() || degx < p.deg_x())
        throw NotBiHomogeneous("target bidegree below actual degrees");
    p.raise_bounds(degz, degx);
    return bihomogenize(p);
}

// --- text grammar -------------------------------------------------------
//
// Variables: z, X0', X1', X0..Xn; rational literals; + - * ^; parentheses.
// Affine parses reject the X' group and X0; bi-homogeneous parses reject z.

namespace detail {

class PolyParser {
public:
    PolyParser(const std::string& text, int n) : s_(text), n_(n) {}

    // generic exponent key: [ez, e0', e1', e0, e1..en]
    std::map<std::vector<int>, BigRational> parse() {
        auto r = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "' at position " +
                             std::to_string(pos_) + " in '" + s_ + "'");
        return r;
    }

private:
    using Terms = std::map<std::vector<int>, BigRational>;

    Terms expr() {
        Terms acc = term();
        skip_ws();
        while (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
            char op = s_[pos_++];
            Terms t = term();
            for (auto& [k, c] : t) add(acc, k, op == '+' ? c : -c);
        }
        return acc;
    }

    Terms term() {
        Terms acc = factor();
        skip_ws();
        while (pos_ < s_.size() && s_[pos_] == '*') {
            ++pos_;
            acc = mul(acc, factor());
            skip_ws();
        }
        return acc;
    }

    Terms factor() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '-') {
            ++pos_;
            Terms t = factor();
            Terms r;
            for (auto& [k, c] : t) r[k] = -c;
            return r;
        }
        Terms base = atom();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw ParseError("exponent expected after '^' in '" + s_ + "'");
            int e = std::stoi(s_.substr(start, pos_ - start));
            Terms r = one();
            for (int i = 0; i < e; ++i) r = mul(r, base);
            return r;
        }
        return base;
    }

    Terms atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of polynomial '" + s_ + "'");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Terms t = expr();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != ')')
                throw ParseError("missing ')' in '" + s_ + "'");
            ++pos_;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return literal();
        if (c == 'z') {
            ++pos_;
            return variable_key(0);
        }
        if (c == 'X') return x_variable();
        throw ParseError("unexpected character '" + std::string(1, c) + "' in '" + s_ + "'");
    }

    Terms literal() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        BigInt num(s_.substr(start, pos_ - start));
        BigInt den = 1;
        // fraction only when '/' is directly followed by digits (so that a
        // rational-function slash elsewhere stays visible to the caller)
        if (pos_ + 1 < s_.size() && s_[pos_] == '/' &&
            std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
            ++pos_;
            std::size_t dstart = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            den = BigInt(s_.substr(dstart, pos_ - dstart));
        }
        Terms t;
        t[zero_key()] = BigRational(num, den);
        return t;
    }

    Terms x_variable() {
        ++pos_;  // consume 'X'
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("variable index expected after 'X' in '" + s_ + "'");
        int idx = std::stoi(s_.substr(start, pos_ - start));
        bool prime = pos_ < s_.size() && s_[pos_] == '\'';
        if (prime) ++pos_;
        if (prime) {
            if (idx > 1) throw ParseError("only X0' and X1' exist in '" + s_ + "'");
            return variable_key(1 + idx);
        }
        if (idx > n_)
            throw ParseError("variable X" + std::to_string(idx) + " exceeds arity n=" + std::to_string(n_));
        return variable_key(3 + idx);
    }

    std::vector<int> zero_key() const { return std::vector<int>(static_cast<std::size_t>(n_) + 4, 0); }

    Terms variable_key(int slot) {
        std::vector<int> k = zero_key();
        k[slot] = 1;
        Terms t;
        t[k] = 1;
        return t;
    }

    Terms one() {
        Terms t;
        t[zero_key()] = 1;
        return t;
    }

    static void add(Terms& acc, const std::vector<int>& k, const BigRational& c) {
        auto it = acc.find(k);
        if (it == acc.end()) {
            if (c != 0) acc.emplace(k, c);
        } else {
            it->second += c;
            if (it->second == 0) acc.erase(it);
        }
    }

    static Terms mul(const Terms& a, const Terms& b) {
        Terms r;
        for (const auto& [ka, ca] : a)
            for (const auto& [kb, cb] : b) {
                std::vector<int> k(ka.size());
                for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
                add(r, k, ca * cb);
            }
        return r;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string s_;
    int n_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline AffinePolynomial parse_affine(const std::string& text, int n,
                                     const Field& field = Field::rationals()) {
    auto generic = detail::PolyParser(text, n).parse();
    AffinePolynomial p(n, Field::rationals());
    std::vector<int> key(static_cast<std::size_t>(n) + 1);
    for (const auto& [k, c] : generic) {
        if (k[1] || k[2] || k[3])
            throw ParseError("bi-homogeneous variable in affine polynomial '" + text + "'");
        key[0] = k[0];
        for (int i = 0; i < n; ++i) key[1 + i] = k[4 + i];
        p.add_term(key, FieldScalar::rational(c));
    }
    return field.is_rational() ? p : p.to_field(field);
}

inline BiPolynomial parse_bipoly(const std::string& text, int n,
                                 const Field& field = Field::rationals()) {
    auto generic = detail::PolyParser(text, n).parse();
    BiPolynomial p(n, Field::rationals());
    std::vector<int> key(static_cast<std::size_t>(n) + 3);
    for (const auto& [k, c] : generic) {
        if (k[0])
            throw ParseError("affine variable z in bi-homogeneous polynomial '" + text + "'");
        for (std::size_t i = 0; i + 1 < k.size(); ++i) key[i] = k[i + 1];
        p.add_term(key, FieldScalar::rational(c));
    }
    return field.is_rational() ? p : p.to_field(field);
}

// --- canonical printing ---------------------------------------------------
// Terms ordered graded-lexicographically within each group, X' group first.

namespace detail {

inline bool print_order(const std::vector<int>& a, const std::vector<int>& b) {
    int ap = a[0] + a[1], bp = b[0] + b[1];
    if (ap != bp) return ap > bp;
    if (a[0] != b[0]) return a[0] > b[0];
    int ax = 0, bx = 0;
    for (std::size_t i = 2; i < a.size(); ++i) { ax += a[i]; bx += b[i]; }
    if (ax != bx) return ax > bx;
    return a > b;  // lex on the X exponents
}

inline void append_power(std::string& out, const std::string& var, int e, bool& first) {
    if (e == 0) return;
    if (!first) out += "*";
    out += var;
    if (e > 1) out += "^" + std::to_string(e);
    first = false;
}

inline std::string term_string(const std::vector<int>& key, const FieldScalar& c,
                               bool bihom, int n) {
    std::string mono;
    bool first = true;
    if (bihom) {
        append_power(mono, "X0'", key[0], first);
        append_power(mono, "X1'", key[1], first);
        for (int i = 0; i <= n; ++i) append_power(mono, "X" + std::to_string(i), key[2 + i], first);
    } else {
        append_power(mono, "z", key[0], first);
        for (int i = 1; i <= n; ++i) append_power(mono, "X" + std::to_string(i), key[i], first);
    }
    std::string cs = c.to_string();
    if (mono.empty()) return cs;
    if (cs == "1") return mono;
    if (cs == "-1") return "-" + mono;
    return cs + "*" + mono;
}

template <class TermMap>
inline std::string poly_string(const TermMap& terms, bool bihom, int n) {
    if (terms.empty()) return "0";
    std::vector<std::pair<std::vector<int>, FieldScalar>> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return print_order(a.first, b.first); });
    std::string out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::string t = term_string(sorted[i].first, sorted[i].second, bihom, n);
        if (i == 0) {
            out = t;
        } else if (!t.empty() && t[0] == '-') {
            out += " - " + t.substr(1);
        } else {
            out += " + " + t;
        }
    }
    return out;
}

}  // namespace detail

inline std::string BiPolynomial::to_string() const {
    return detail::poly_string(terms_, true, n_);
}

inline std::string AffinePolynomial::to_string() const {
    // reuse the generic printer with keys [ez, e1..en]
    std::map<std::vector<int>, FieldScalar> shifted;
    for (const auto& [k, c] : terms_) {
        std::vector<int> kk(k.size() + 1, 0);
        kk[0] = k[0];
        for (std::size_t i = 1; i < k.size(); ++i) kk[i] = k[i];
        shifted.emplace(kk, c);
    }
    if (shifted.empty()) return "0";
    std::vector<std::pair<std::vector<int>, FieldScalar>> sorted(shifted.begin(), shifted.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.first[0] != b.first[0]) return a.first[0] > b.first[0];
        return a.first > b.first;
    });
    std::string out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::vector<int> k = sorted[i].first;
        std::string mono;
        bool first = true;
        detail::append_power(mono, "z", k[0], first);
        for (int v = 1; v <= n_; ++v) detail::append_power(mono, "X" + std::to_string(v), k[v], first);
        std::string cs = sorted[i].second.to_string();
        std::string t = mono.empty() ? cs
                        : cs == "1"  ? mono
                        : cs == "-1" ? "-" + mono
                                     : cs + "*" + mono;
        if (i == 0)
            out = t;
        else if (!t.empty() && t[0] == '-')
            out += " - " + t.substr(1);
        else
            out += " + " + t;
    }
    return out;
}

// All monomial keys of bidegree exactly (a, b), deterministic order.
inline std::vector<std::vector<int>> monomials_of_bidegree(int n, int a, int b) {
    std::vector<std::vector<int>> xparts;
    std::vector<int> cur(static_cast<std::size_t>(n) + 1, 0);
    // compositions of b into n+1 parts, lexicographic by (e0, e1, ..., en)
    std::function<void(int, int)> rec = [&](int idx, int rest) {
        if (idx == n) {
            cur[idx] = rest;
            xparts.push_back(cur);
            return;
        }
        for (int e = 0; e <= rest; ++e) {
            cur[idx] = e;
            rec(idx + 1, rest - e);
        }
    };
    rec(0, b);
    std::vector<std::vector<int>> keys;
    keys.reserve(static_cast<std::size_t>(a + 1) * xparts.size());
    for (int e0p = a; e0p >= 0; --e0p)
        for (const auto& xp : xparts) {
            std::vector<int> k(static_cast<std::size_t>(n) + 3);
            k[0] = e0p;
            k[1] = a - e0p;
            for (int i = 0; i <= n; ++i) k[2 + i] = xp[i];
            keys.push_back(std::move(k));
        }
    return keys;
}

}  // namespace multlab
