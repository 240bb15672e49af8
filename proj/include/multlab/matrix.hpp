#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "multlab/field.hpp"

namespace multlab {

// Dense matrix over one exact field, row-major.
class ExactMatrix {
public:
    ExactMatrix(const Field& field, std::size_t rows, std::size_t cols)
        : field_(field), rows_(rows), cols_(cols),
          entries_(rows * cols, FieldScalar::zero(field)) {}

    static ExactMatrix from_rows(const Field& field,
                                 const std::vector<std::vector<FieldScalar>>& rows) {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        ExactMatrix m(field, rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols)
                throw ConfigError("ragged rows in matrix");
            for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
        }
        m.check_well_formed();
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const Field& field() const noexcept { return field_; }

    FieldScalar& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const FieldScalar& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::vector<FieldScalar> row(std::size_t i) const {
        return std::vector<FieldScalar>(entries_.begin() + i * cols_,
                                        entries_.begin() + (i + 1) * cols_);
    }

    void check_well_formed() const {
        for (const auto& e : entries_)
            if (e.field() != field_)
                throw FieldMismatch("matrix entry from " + e.field().name() +
                                    " in a matrix over " + field_.name());
    }

private:
    Field field_;
    std::size_t rows_, cols_;
    std::vector<FieldScalar> entries_;
};

namespace detail {

// Fraction-free row-echelon accumulator. Rows arrive one at a time; over Q
// each row is cleared to an integer vector and eliminations use
// cross-multiplication followed by content reduction, which keeps entries
// integral without Gaussian fraction growth. Over F_p plain elimination is
// used. Pivot choice: first nonzero entry of the reduced row.
class EchelonAccumulator {
public:
    explicit EchelonAccumulator(const Field& field) : field_(field) {}

    // Returns true when the row increased the rank.
    bool add_row(const std::vector<FieldScalar>& row) {
        if (field_.is_rational()) return add_row_int(to_integer_row(row));
        return add_row_modp(row);
    }

    std::size_t rank() const noexcept {
        return field_.is_rational() ? int_rows_.size() : fp_rows_.size();
    }

private:
    struct IntRow {
        std::vector<BigInt> v;
        std::size_t pivot;
    };
    struct FpRow {
        std::vector<FieldScalar> v;
        std::size_t pivot;
    };

    static std::vector<BigInt> to_integer_row(const std::vector<FieldScalar>& row) {
        BigInt lcm = 1;
        for (const auto& s : row) {
            const BigInt& d = boost::multiprecision::denominator(s.rational_value());
            lcm = boost::multiprecision::lcm(lcm, d);
        }
        std::vector<BigInt> out(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            const BigRational& q = row[j].rational_value();
            out[j] = boost::multiprecision::numerator(q) *
                     (lcm / boost::multiprecision::denominator(q));
        }
        reduce_content(out);
        return out;
    }

    static void reduce_content(std::vector<BigInt>& v) {
        BigInt g = 0;
        for (const auto& x : v) {
            g = boost::multiprecision::gcd(g, x);
            if (g == 1) break;
        }
        if (g > 1)
            for (auto& x : v) x /= g;
    }

    static std::size_t first_nonzero(const std::vector<BigInt>& v) {
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[j] != 0) return j;
        return v.size();
    }

    bool add_row_int(std::vector<BigInt> r) {
        for (const auto& er : int_rows_) {
            if (er.pivot >= r.size()) continue;
            if (r[er.pivot] == 0) continue;
            const BigInt a = er.v[er.pivot], b = r[er.pivot];
            for (std::size_t j = 0; j < r.size(); ++j) r[j] = a * r[j] - b * er.v[j];
            reduce_content(r);
        }
        std::size_t p = first_nonzero(r);
        if (p == r.size()) return false;
        if (r[p] < 0)
            for (auto& x : r) x = -x;
        insert_sorted(int_rows_, IntRow{std::move(r), p});
        return true;
    }

    bool add_row_modp(std::vector<FieldScalar> r) {
        for (const auto& er : fp_rows_) {
            if (er.pivot >= r.size()) continue;
            if (r[er.pivot].is_zero()) continue;
            FieldScalar c = r[er.pivot] / er.v[er.pivot];
            for (std::size_t j = 0; j < r.size(); ++j) r[j] -= c * er.v[j];
        }
        std::size_t p = r.size();
        for (std::size_t j = 0; j < r.size(); ++j)
            if (!r[j].is_zero()) { p = j; break; }
        if (p == r.size()) return false;
        insert_sorted(fp_rows_, FpRow{std::move(r), p});
        return true;
    }

    template <class R, class V>
    static void insert_sorted(V& rows, R row) {
        auto it = rows.begin();
        while (it != rows.end() && it->pivot < row.pivot) ++it;
        rows.insert(it, std::move(row));
    }

    Field field_;
    std::vector<IntRow> int_rows_;
    std::vector<FpRow> fp_rows_;
};

// Reduced row-echelon form with deterministic pivoting: columns scanned
// left-to-right, pivot row is the first remaining row with a nonzero entry.
struct Rref {
    std::vector<std::vector<FieldScalar>> rows;
    std::vector<std::size_t> pivot_cols;  // pivot column of row i
};

inline Rref rref(const ExactMatrix& M) {
    M.check_well_formed();
    std::vector<std::vector<FieldScalar>> a;
    a.reserve(M.rows());
    for (std::size_t i = 0; i < M.rows(); ++i) a.push_back(M.row(i));

    Rref out;
    std::size_t next_row = 0;
    for (std::size_t col = 0; col < M.cols() && next_row < a.size(); ++col) {
        std::size_t pr = next_row;
        while (pr < a.size() && a[pr][col].is_zero()) ++pr;
        if (pr == a.size()) continue;
        std::swap(a[next_row], a[pr]);
        FieldScalar inv = a[next_row][col].inverse();
        for (auto& x : a[next_row]) x *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == next_row || a[i][col].is_zero()) continue;
            FieldScalar c = a[i][col];
            for (std::size_t j = 0; j < M.cols(); ++j) a[i][j] -= c * a[next_row][j];
        }
        out.pivot_cols.push_back(col);
        ++next_row;
    }
    a.resize(next_row, std::vector<FieldScalar>());
    out.rows = std::move(a);
    return out;
}

}  // namespace detail

// Basis of the right null space. Each vector is normalized so its first
// nonzero entry is 1; vectors are ordered by their free column (reduced
// column-echelon order), which makes the output deterministic.
inline std::vector<std::vector<FieldScalar>> kernel_basis(const ExactMatrix& M) {
    detail::Rref r = detail::rref(M);
    std::vector<bool> is_pivot(M.cols(), false);
    for (std::size_t c : r.pivot_cols) is_pivot[c] = true;

    std::vector<std::vector<FieldScalar>> basis;
    for (std::size_t f = 0; f < M.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<FieldScalar> v(M.cols(), FieldScalar::zero(M.field()));
        v[f] = FieldScalar::one(M.field());
        for (std::size_t i = 0; i < r.pivot_cols.size(); ++i)
            v[r.pivot_cols[i]] = -r.rows[i][f];
        for (const auto& x : v) {
            if (!x.is_zero()) {
                FieldScalar inv = x.inverse();
                for (auto& y : v) y *= inv;
                break;
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

// Entry r is the rank of the submatrix formed by the first r rows
// (r = 0 .. rows). Nondecreasing, steps of 0 or 1, entry 0 is 0.
inline std::vector<std::size_t> rank_profile(const ExactMatrix& M) {
    M.check_well_formed();
    detail::EchelonAccumulator acc(M.field());
    std::vector<std::size_t> profile;
    profile.reserve(M.rows() + 1);
    profile.push_back(0);
    for (std::size_t i = 0; i < M.rows(); ++i) {
        acc.add_row(M.row(i));
        profile.push_back(acc.rank());
    }
    return profile;
}

inline std::size_t rank(const ExactMatrix& M) { return rank_profile(M).back(); }

// Any exact solution x of M x = rhs, or nullopt when inconsistent.
// Free variables are set to zero; deterministic.
inline std::optional<std::vector<FieldScalar>> solve_linear(const ExactMatrix& M,
                                                            const std::vector<FieldScalar>& rhs) {
    if (rhs.size() != M.rows()) throw ArityMismatch("rhs length does not match row count");
    ExactMatrix aug(M.field(), M.rows(), M.cols() + 1);
    for (std::size_t i = 0; i < M.rows(); ++i) {
        for (std::size_t j = 0; j < M.cols(); ++j) aug.at(i, j) = M.at(i, j);
        aug.at(i, M.cols()) = rhs[i];
    }
    detail::Rref r = detail::rref(aug);
    std::vector<FieldScalar> x(M.cols(), FieldScalar::zero(M.field()));
    for (std::size_t i = 0; i < r.pivot_cols.size(); ++i) {
        if (r.pivot_cols[i] == M.cols()) return std::nullopt;  // pivot in rhs column
        x[r.pivot_cols[i]] = r.rows[i][M.cols()];
    }
    return x;
}

}  // namespace multlab
