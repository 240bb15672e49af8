#pragma once

#include <utility>
#include <vector>

#include "multlab/bipoly.hpp"
#include "multlab/matrix.hpp"
#include "multlab/series.hpp"
#include "multlab/upoly.hpp"

namespace multlab {

// System f_i(p(z)) = A_i(z, f) / A_0(z, f) with ord p >= 2, together with a
// fixed-point seed f(0). p may be a rational fraction; it is expanded as a
// series when solving, its degree d is kept as metadata only.
class MahlerSystem {
public:
    MahlerSystem(int n, UPoly p_num, UPoly p_den, std::vector<AffinePolynomial> a,
                 std::vector<FieldScalar> seed)
        : n_(n), p_num_(std::move(p_num)), p_den_(std::move(p_den)), a_(std::move(a)),
          seed_(std::move(seed)) {
        if (static_cast<int>(a_.size()) != n_ + 1)
            throw ArityMismatch("Mahler system needs A0..An");
        if (static_cast<int>(seed_.size()) != n_)
            throw ArityMismatch("Mahler system needs n seed values");
        for (const auto& p : a_)
            if (p.n() != n_) throw ArityMismatch("A_i arity mismatch");
        if (p_den_.is_zero()) throw ConfigError("p(z) has zero denominator");
        if (p_den_.coeff(0).is_zero())
            throw ConfigError("denominator of p(z) must not vanish at z = 0");
        if (delta() < 2)
            throw ConfigError("ord p(z) = " + std::to_string(delta()) + ", need >= 2");
        FieldScalar a0 = a_[0].eval_scalar(zero(), seed_);
        if (a0.is_zero()) throw DegenerateA0("A0(0, seed) = 0");
        for (int i = 1; i <= n_; ++i) {
            FieldScalar lhs = seed_[i - 1] * a0;
            FieldScalar rhs = a_[i].eval_scalar(zero(), seed_);
            if (lhs != rhs)
                throw SeedNotFixedPoint("f_" + std::to_string(i) + "(0) * A0(0, seed) != A_" +
                                        std::to_string(i) + "(0, seed)");
        }
    }

    int n() const noexcept { return n_; }
    const Field& field() const noexcept { return a_[0].field(); }
    const std::vector<AffinePolynomial>& a() const noexcept { return a_; }
    const std::vector<FieldScalar>& seed() const noexcept { return seed_; }
    const UPoly& p_num() const noexcept { return p_num_; }
    const UPoly& p_den() const noexcept { return p_den_; }

    // delta = ord_{z=0} p; finite because p != 0 is required
    int delta() const {
        if (p_num_.is_zero()) throw ConfigError("p(z) = 0 is not a Mahler transform");
        return p_num_.ord();  // den(0) != 0, so ord p = ord num
    }

    int d() const { return std::max(p_num_.deg(), p_den_.deg()); }

    TruncatedSeries p_series(std::size_t precision) const {
        return mul_series(p_num_.to_series(precision), invert_series(p_den_.to_series(precision)));
    }

    // Coefficient-step matrix M_ij = dA_i/dX_j(0,seed) - f_i(0) dA_0/dX_j(0,seed).
    ExactMatrix step_matrix() const {
        ExactMatrix M(field(), n_, n_);
        for (int j = 1; j <= n_; ++j) {
            FieldScalar d0 = a_[0].derivative_x(j).eval_scalar(zero(), seed_);
            for (int i = 1; i <= n_; ++i) {
                FieldScalar di = a_[i].derivative_x(j).eval_scalar(zero(), seed_);
                M.at(i - 1, j - 1) = di - seed_[i - 1] * d0;
            }
        }
        return M;
    }

private:
    FieldScalar zero() const { return FieldScalar::zero(field()); }

    int n_;
    UPoly p_num_, p_den_;
    std::vector<AffinePolynomial> a_;
    std::vector<FieldScalar> seed_;
};

// System f_i'(z) = A_i(z, f) / A_0(z, f) with initial values f(0).
class DifferentialSystem {
public:
    DifferentialSystem(int n, std::vector<AffinePolynomial> a, std::vector<FieldScalar> init)
        : n_(n), a_(std::move(a)), init_(std::move(init)) {
        if (static_cast<int>(a_.size()) != n_ + 1)
            throw ArityMismatch("differential system needs A0..An");
        if (static_cast<int>(init_.size()) != n_)
            throw ArityMismatch("differential system needs n initial values");
        for (const auto& p : a_)
            if (p.n() != n_) throw ArityMismatch("A_i arity mismatch");
        if (a_[0].eval_scalar(FieldScalar::zero(field()), init_).is_zero())
            throw DegenerateA0("A0(0, init) = 0");
    }

    int n() const noexcept { return n_; }
    const Field& field() const noexcept { return a_[0].field(); }
    const std::vector<AffinePolynomial>& a() const noexcept { return a_; }
    const std::vector<FieldScalar>& init() const noexcept { return init_; }

private:
    int n_;
    std::vector<AffinePolynomial> a_;
    std::vector<FieldScalar> init_;
};

namespace detail {

inline FunctionalPoint point_from_coeffs(const Field& f,
                                         const std::vector<std::vector<FieldScalar>>& coeffs,
                                         std::size_t precision) {
    std::vector<TruncatedSeries> fs;
    fs.reserve(coeffs.size());
    for (const auto& c : coeffs) {
        std::vector<FieldScalar> head(c.begin(), c.begin() + precision);
        fs.emplace_back(f, std::move(head));
    }
    return FunctionalPoint(std::move(fs));
}

}  // namespace detail

// Expand the unique solution with the given seed, coefficient by
// coefficient: at step m the unknowns enter linearly through the step
// matrix, everything else is known from lower-order data.
inline FunctionalPoint solve_mahler(const MahlerSystem& S, std::size_t N) {
    if (N < 1) throw ConfigError("precision must be >= 1");
    const Field& fld = S.field();
    const int n = S.n();
    const int delta = S.delta();

    ExactMatrix M = S.step_matrix();
    if (rank(M) < static_cast<std::size_t>(n))
        throw SingularRecursion("coefficient-step matrix is singular; supply a candidate and use "
                                "residual verification instead");
    // columns of M^{-1}, via n exact solves
    std::vector<std::vector<FieldScalar>> minv_cols;
    for (int j = 0; j < n; ++j) {
        std::vector<FieldScalar> e(n, FieldScalar::zero(fld));
        e[j] = FieldScalar::one(fld);
        minv_cols.push_back(*solve_linear(M, e));
    }

    TruncatedSeries p = S.p_series(N);
    // powers of p that survive truncation: delta * k < N
    std::vector<TruncatedSeries> ppow;
    ppow.push_back(TruncatedSeries::constant(fld, FieldScalar::one(fld), N));
    for (std::size_t k = 1; k * static_cast<std::size_t>(delta) < N; ++k)
        ppow.push_back(mul_series(ppow.back(), p));

    std::vector<std::vector<FieldScalar>> f(n, std::vector<FieldScalar>(N, FieldScalar::zero(fld)));
    // composed[i] accumulates f_i(p(z)) as coefficients of f_i become known
    std::vector<TruncatedSeries> composed(n, TruncatedSeries(fld, N));
    for (int i = 0; i < n; ++i) {
        f[i][0] = S.seed()[i];
        composed[i] = ppow[0] * f[i][0];
    }

    for (std::size_t m = 1; m < N; ++m) {
        FunctionalPoint cur = detail::point_from_coeffs(fld, f, m + 1);
        std::vector<FieldScalar> known(n, FieldScalar::zero(fld));
        TruncatedSeries a0 = evaluate(S.a()[0], cur);
        for (int i = 0; i < n; ++i) {
            TruncatedSeries ai = evaluate(S.a()[i + 1], cur);
            TruncatedSeries resid = ai - mul_series(a0, composed[i].truncated(m + 1));
            known[i] = resid.coeff(m);
        }
        // M eps = -known
        for (int i = 0; i < n; ++i) {
            FieldScalar acc = FieldScalar::zero(fld);
            for (int j = 0; j < n; ++j) acc += minv_cols[j][i] * known[j];
            f[i][m] = -acc;
        }
        for (int i = 0; i < n; ++i)
            if (m < ppow.size()) composed[i] = composed[i] + ppow[m] * f[i][m];
    }
    return detail::point_from_coeffs(fld, f, N);
}

// Power-series solution of the differential system; in characteristic p the
// recursion divides by m and stops with an error at the first m = 0 mod p.
inline FunctionalPoint solve_differential(const DifferentialSystem& S, std::size_t N) {
    if (N < 1) throw ConfigError("precision must be >= 1");
    const Field& fld = S.field();
    const int n = S.n();
    FieldScalar a0_at_0 = S.a()[0].eval_scalar(FieldScalar::zero(fld), S.init());

    std::vector<std::vector<FieldScalar>> f(n, std::vector<FieldScalar>(N, FieldScalar::zero(fld)));
    for (int i = 0; i < n; ++i) f[i][0] = S.init()[i];

    for (std::size_t m = 1; m < N; ++m) {
        if (!fld.is_rational() && m % fld.characteristic() == 0)
            throw CharacteristicDivision("coefficient step " + std::to_string(m) +
                                         " requires division by the characteristic " +
                                         std::to_string(fld.characteristic()));
        FieldScalar mval = fld.is_rational()
                               ? FieldScalar::rational(static_cast<long>(m))
                               : FieldScalar::from_rational_mod(fld, BigRational(m));
        FieldScalar denom = mval * a0_at_0;
        FunctionalPoint cur = detail::point_from_coeffs(fld, f, m + 1);
        TruncatedSeries a0 = evaluate(S.a()[0], cur);
        for (int i = 0; i < n; ++i) {
            TruncatedSeries ai = evaluate(S.a()[i + 1], cur);
            TruncatedSeries resid = ai - mul_series(a0, derive_series(cur.f(i + 1)));
            f[i][m] = resid.coeff(m - 1) / denom;
        }
    }
    return detail::point_from_coeffs(fld, f, N);
}

// Ord of each defining residual, at the precision the data can certify:
// N for a Mahler system, N-1 for a differential one.
inline std::vector<OrdValue> verify_residual(const MahlerSystem& S, const FunctionalPoint& F,
                                             std::size_t N) {
    if (F.n() != S.n()) throw ArityMismatch("point arity does not match system");
    FunctionalPoint G = F.truncated(std::min(N, F.precision()));
    std::size_t prec = G.precision();
    TruncatedSeries p = S.p_series(prec);
    TruncatedSeries a0 = evaluate(S.a()[0], G);
    std::vector<OrdValue> out;
    for (int i = 1; i <= S.n(); ++i) {
        TruncatedSeries comp = compose_series(G.f(i), p);
        TruncatedSeries resid = mul_series(a0, comp) - evaluate(S.a()[i], G);
        out.push_back(ord_series(resid));
    }
    return out;
}

inline std::vector<OrdValue> verify_residual(const DifferentialSystem& S, const FunctionalPoint& F,
                                             std::size_t N) {
    if (F.n() != S.n()) throw ArityMismatch("point arity does not match system");
    FunctionalPoint G = F.truncated(std::min(N, F.precision()));
    TruncatedSeries a0 = evaluate(S.a()[0], G);
    std::vector<OrdValue> out;
    for (int i = 1; i <= S.n(); ++i) {
        TruncatedSeries resid = mul_series(a0, derive_series(G.f(i))) - evaluate(S.a()[i], G);
        out.push_back(ord_series(resid.truncated(G.precision() > 1 ? G.precision() - 1 : 1)));
    }
    return out;
}

}  // namespace multlab
