#ifndef TWISTLAB_LINALG_HPP
#define TWISTLAB_LINALG_HPP

/// Degreewise exact linear algebra over Frac(F[params]): sparse rows of
/// Scalars, canonical reduced row echelon form, kernels, and fraction-free
/// Bareiss determinants.  Every fraction is kept reduced, which is what
/// controls coefficient blowup over the rational function field.

#include <twistlab/scalars.hpp>

#include <optional>
#include <vector>

namespace twistlab {

/// Sparse row: (column, value) pairs sorted by column, no explicit zeros.
struct SparseRow {
    std::vector<std::pair<int, Scalar>> ents;

    bool empty() const { return ents.empty(); }
    int leading_col() const { return ents.empty() ? -1 : ents.front().first; }

    const Scalar* find(int col) const {
        auto it = std::lower_bound(ents.begin(), ents.end(), col,
                                   [](const auto& e, int c) { return e.first < c; });
        if (it != ents.end() && it->first == col) return &it->second;
        return nullptr;
    }

    void push(int col, Scalar v) {
        if (!v.is_zero()) ents.emplace_back(col, std::move(v));
    }

    friend bool operator==(const SparseRow& a, const SparseRow& b) {
        return a.ents == b.ents;
    }
};

/// r - c*s, merged by column.
inline SparseRow row_submul(const SparseRow& r, const Scalar& c, const SparseRow& s) {
    SparseRow out;
    out.ents.reserve(r.ents.size() + s.ents.size());
    size_t i = 0, j = 0;
    while (i < r.ents.size() || j < s.ents.size()) {
        if (j >= s.ents.size() || (i < r.ents.size() && r.ents[i].first < s.ents[j].first)) {
            out.ents.push_back(r.ents[i++]);
        } else if (i >= r.ents.size() || s.ents[j].first < r.ents[i].first) {
            out.push(s.ents[j].first, -(c * s.ents[j].second));
            ++j;
        } else {
            Scalar v = r.ents[i].second - c * s.ents[j].second;
            out.push(r.ents[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

inline SparseRow row_scale(const SparseRow& r, const Scalar& c) {
    SparseRow out;
    if (c.is_zero()) return out;
    out.ents.reserve(r.ents.size());
    for (const auto& [col, v] : r.ents) out.push(col, c * v);
    return out;
}

/// Canonical reduced row echelon form.  Rows end up sorted by pivot column,
/// pivot entries equal to one, pivot columns cleared elsewhere; zero rows are
/// dropped.  The result is unique for a given row space.
struct Rref {
    std::vector<SparseRow> rows;
    std::vector<int> pivots; // pivot column of each row, ascending

    int rank() const { return static_cast<int>(rows.size()); }
};

/// Incremental insertion: each incoming row is reduced against the current
/// basis and, if independent, normalized and back-eliminated into it.  Rows
/// waiting their turn are never touched, which avoids the intermediate
/// expression swell of columnwise elimination; the result is the same
/// canonical RREF.
inline Rref rref(std::vector<SparseRow> rows, int ncols) {
    (void)ncols;
    Rref out;
    for (auto& incoming : rows) {
        SparseRow v = std::move(incoming);
        // forward reduction against the existing pivots
        for (size_t k = 0; k < out.rows.size() && !v.empty(); ++k) {
            const Scalar* e = v.find(out.pivots[k]);
            if (e) v = row_submul(v, *e, out.rows[k]);
        }
        if (v.empty()) continue;
        const int piv = v.leading_col();
        v = row_scale(v, v.ents.front().second.inverse());
        for (size_t k = 0; k < out.rows.size(); ++k) {
            const Scalar* e = out.rows[k].find(piv);
            if (e) out.rows[k] = row_submul(out.rows[k], *e, v);
        }
        auto pos = std::lower_bound(out.pivots.begin(), out.pivots.end(), piv);
        size_t idx = static_cast<size_t>(pos - out.pivots.begin());
        out.pivots.insert(pos, piv);
        out.rows.insert(out.rows.begin() + idx, std::move(v));
    }
    return out;
}

inline int rank_of(std::vector<SparseRow> rows, int ncols) {
    return rref(std::move(rows), ncols).rank();
}

/// Basis of the right kernel {v : M v = 0}, one canonical RREF row per free
/// column.
inline Rref kernel(const Rref& m, int ncols, const FieldPtr& field) {
    std::vector<bool> is_pivot(ncols, false);
    for (int p : m.pivots) is_pivot[p] = true;
    std::vector<SparseRow> out;
    for (int f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        SparseRow v;
        for (size_t k = 0; k < m.rows.size(); ++k) {
            const Scalar* e = m.rows[k].find(f);
            if (e) v.push(m.pivots[k], -*e);
        }
        v.push(f, Scalar::one(field));
        std::sort(v.ents.begin(), v.ents.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(std::move(v));
    }
    return rref(std::move(out), ncols);
}

inline Rref kernel_of_rows(std::vector<SparseRow> rows, int ncols, const FieldPtr& field) {
    return kernel(rref(std::move(rows), ncols), ncols, field);
}

/// Reduce a row against an RREF basis; the remainder is zero iff the row is
/// in the row space.
inline SparseRow reduce_against(const Rref& base, SparseRow row) {
    for (size_t k = 0; k < base.rows.size(); ++k) {
        const Scalar* e = row.find(base.pivots[k]);
        if (e) row = row_submul(row, *e, base.rows[k]);
    }
    return row;
}

inline bool in_row_space(const Rref& base, const SparseRow& row) {
    return reduce_against(base, row).empty();
}

/// Row space intersection (Zassenhaus block construction).
inline Rref intersect_spaces(const Rref& a, const Rref& b, int ncols, const FieldPtr&) {
    std::vector<SparseRow> rows;
    for (const auto& v : a.rows) {
        SparseRow r = v;
        for (const auto& [col, val] : v.ents) r.ents.emplace_back(col + ncols, val);
        rows.push_back(std::move(r));
    }
    for (const auto& w : b.rows) rows.push_back(w);
    Rref big = rref(std::move(rows), 2 * ncols);
    std::vector<SparseRow> inter;
    for (const auto& r : big.rows) {
        if (r.leading_col() >= ncols) {
            SparseRow s;
            for (const auto& [col, val] : r.ents) s.ents.emplace_back(col - ncols, val);
            inter.push_back(std::move(s));
        }
    }
    return rref(std::move(inter), ncols);
}

inline Rref sum_spaces(const Rref& a, const Rref& b, int ncols) {
    std::vector<SparseRow> rows = a.rows;
    rows.insert(rows.end(), b.rows.begin(), b.rows.end());
    return rref(std::move(rows), ncols);
}

inline bool space_contains(const Rref& a, const Rref& b) {
    for (const auto& r : b.rows)
        if (!in_row_space(a, r)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Dense fraction-free determinant (Bareiss)
// ---------------------------------------------------------------------------

/// Determinant of a dense ParamPoly matrix by fraction-free Bareiss
/// elimination; all intermediate divisions are exact.
inline ParamPoly bareiss_det(std::vector<std::vector<ParamPoly>> m, long p, int nvars) {
    const size_t n = m.size();
    if (n == 0) return ParamPoly::constant(p, nvars, 1);
    int sign = 1;
    ParamPoly prev = ParamPoly::constant(p, nvars, 1);
    for (size_t k = 0; k + 1 < n; ++k) {
        size_t piv = n;
        for (size_t i = k; i < n; ++i)
            if (!m[i][k].is_zero()) { piv = i; break; }
        if (piv == n) return ParamPoly::zero(p, nvars);
        if (piv != k) {
            std::swap(m[piv], m[k]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                ParamPoly t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                m[i][j] = divide_exact(t, prev);
            }
            m[i][k] = ParamPoly::zero(p, nvars);
        }
        prev = m[k][k];
    }
    ParamPoly d = m[n - 1][n - 1];
    if (sign < 0) d = -d;
    return d;
}

/// Determinant of a dense Scalar matrix (used for small automorphism
/// matrices).
inline Scalar scalar_det(std::vector<std::vector<Scalar>> m, const FieldPtr& field) {
    const size_t n = m.size();
    Scalar det = Scalar::one(field);
    for (size_t k = 0; k < n; ++k) {
        size_t piv = n;
        for (size_t i = k; i < n; ++i)
            if (!m[i][k].is_zero()) { piv = i; break; }
        if (piv == n) return Scalar::zero(field);
        if (piv != k) {
            std::swap(m[piv], m[k]);
            det = -det;
        }
        det = det * m[k][k];
        Scalar inv = m[k][k].inverse();
        for (size_t i = k + 1; i < n; ++i) {
            if (m[i][k].is_zero()) continue;
            Scalar f = m[i][k] * inv;
            for (size_t j = k; j < n; ++j) m[i][j] = m[i][j] - f * m[k][j];
        }
    }
    return det;
}

/// Exact inverse of a dense Scalar matrix via Gauss-Jordan; throws on
/// singular input.
inline std::vector<std::vector<Scalar>> scalar_inverse(std::vector<std::vector<Scalar>> m,
                                                       const FieldPtr& field) {
    const size_t n = m.size();
    std::vector<std::vector<Scalar>> inv;
    inv.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Scalar> row;
        row.reserve(n);
        for (size_t j = 0; j < n; ++j)
            row.push_back(i == j ? Scalar::one(field) : Scalar::zero(field));
        inv.push_back(std::move(row));
    }
    for (size_t k = 0; k < n; ++k) {
        size_t piv = n;
        for (size_t i = k; i < n; ++i)
            if (!m[i][k].is_zero()) { piv = i; break; }
        if (piv == n) throw DivideByZero("singular matrix");
        std::swap(m[piv], m[k]);
        std::swap(inv[piv], inv[k]);
        Scalar s = m[k][k].inverse();
        for (size_t j = 0; j < n; ++j) {
            m[k][j] = m[k][j] * s;
            inv[k][j] = inv[k][j] * s;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == k || m[i][k].is_zero()) continue;
            Scalar f = m[i][k];
            for (size_t j = 0; j < n; ++j) {
                m[i][j] = m[i][j] - f * m[k][j];
                inv[i][j] = inv[i][j] - f * inv[k][j];
            }
        }
    }
    return inv;
}

} // namespace twistlab

#endif
