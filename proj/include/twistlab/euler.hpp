#ifndef TWISTLAB_EULER_HPP
#define TWISTLAB_EULER_HPP

/// Eulerian derivatives D_p : f(y) -> (f(py) - f(y))/(py - y) (and D_1 =
/// d/dy in characteristic 0) acting on a finite Laurent window, the
/// composite operators w_i = y^{-1} + (p_i - 1) D_{p_i}, their relations,
/// and graded dimensions of word spans compared against dim R(phi,c)_n.

#include <twistlab/twist.hpp>

namespace twistlab {

/// Laurent polynomial supported on exponents in [-m, m].
class LaurentWindow {
public:
    LaurentWindow(FieldPtr field, int half_width)
        : field_(std::move(field)), m_(half_width) {}

    static LaurentWindow basis_vector(const FieldPtr& f, int half_width, long exp) {
        LaurentWindow w(f, half_width);
        w.set(exp, Scalar::one(f));
        return w;
    }

    const FieldPtr& field() const { return field_; }
    int half_width() const { return m_; }
    const std::map<long, Scalar>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void set(long exp, const Scalar& c) {
        if (exp < -m_ || exp > m_) throw WindowTooSmall("Laurent exponent outside window");
        if (c.is_zero())
            coeffs_.erase(exp);
        else
            coeffs_.insert_or_assign(exp, c);
    }

    Scalar coeff(long exp) const {
        auto it = coeffs_.find(exp);
        return it == coeffs_.end() ? Scalar::zero(field_) : it->second;
    }

    friend bool operator==(const LaurentWindow& a, const LaurentWindow& b) {
        return a.coeffs_ == b.coeffs_;
    }

private:
    FieldPtr field_;
    int m_;
    std::map<long, Scalar> coeffs_;
};

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// Atomic degree(-1) operator on Laurent polynomials.
struct AtomicOp {
    enum Kind { Dp, D1, Yinv, Wcollapsed } kind = Yinv;
    std::optional<Scalar> p; // for Dp / Wcollapsed

    /// op(y^j) = coeff(j) * y^{j-1}.
    Scalar action_coeff(const FieldPtr& f, long j) const {
        switch (kind) {
            case Dp: {
                // (p^j - 1)/(p - 1)
                Scalar pj = p->pow(j);
                return (pj - Scalar::one(f)) / (*p - Scalar::one(f));
            }
            case D1:
                return Scalar::from_int(f, j);
            case Yinv:
                return Scalar::one(f);
            case Wcollapsed:
                return p->pow(j);
        }
        return Scalar::zero(f);
    }
};

inline AtomicOp make_Dp(const Scalar& p) {
    if (p.is_zero()) throw std::invalid_argument("D_p needs p != 0");
    if (p.is_one()) throw std::invalid_argument("use make_D1 for p = 1");
    return AtomicOp{AtomicOp::Dp, p};
}

inline AtomicOp make_D1(const FieldPtr& f) {
    if (f->characteristic() != 0)
        throw std::invalid_argument("D_1 = d/dy requires characteristic 0");
    return AtomicOp{AtomicOp::D1, std::nullopt};
}

inline AtomicOp make_yinv() { return AtomicOp{AtomicOp::Yinv, std::nullopt}; }

inline AtomicOp make_w_collapsed(const Scalar& p) {
    if (p.is_zero()) throw std::invalid_argument("w_i needs p != 0");
    return AtomicOp{AtomicOp::Wcollapsed, p};
}

/// Formal sum of scalar multiples of words in atomic operators; composition
/// concatenates words and addition merges terms.
struct EulerOp {
    std::vector<std::pair<Scalar, std::vector<AtomicOp>>> terms;

    static EulerOp atom(const AtomicOp& a, const FieldPtr& f) {
        EulerOp e;
        e.terms.emplace_back(Scalar::one(f), std::vector<AtomicOp>{a});
        return e;
    }

    static EulerOp scaled(const Scalar& s, const AtomicOp& a) {
        EulerOp e;
        e.terms.emplace_back(s, std::vector<AtomicOp>{a});
        return e;
    }

    size_t max_word_length() const {
        size_t n = 0;
        for (const auto& [s, w] : terms) n = std::max(n, w.size());
        return n;
    }

    friend EulerOp operator+(const EulerOp& a, const EulerOp& b) {
        EulerOp e = a;
        e.terms.insert(e.terms.end(), b.terms.begin(), b.terms.end());
        return e;
    }

    friend EulerOp operator*(const Scalar& s, const EulerOp& a) {
        EulerOp e;
        for (const auto& [c, w] : a.terms) e.terms.emplace_back(s * c, w);
        return e;
    }

    /// Operator composition a . b (b applied first).
    friend EulerOp compose(const EulerOp& a, const EulerOp& b) {
        EulerOp e;
        for (const auto& [ca, wa] : a.terms) {
            for (const auto& [cb, wb] : b.terms) {
                std::vector<AtomicOp> w = wa;
                w.insert(w.end(), wb.begin(), wb.end());
                e.terms.emplace_back(ca * cb, w);
            }
        }
        return e;
    }
};

/// w_i = y^{-1} + (p_i - 1) D_{p_i}, built as a genuine sum (the collapsed
/// action p_i^j y^{j-1} is a theorem about it, not the definition).
inline EulerOp make_w(const Scalar& p, const FieldPtr& f) {
    return EulerOp::atom(make_yinv(), f) + EulerOp::scaled(p - Scalar::one(f), make_Dp(p));
}

inline LaurentWindow apply_atomic(const AtomicOp& op, const LaurentWindow& fw) {
    const FieldPtr& f = fw.field();
    LaurentWindow out(f, fw.half_width());
    for (const auto& [j, c] : fw.coeffs()) {
        if (j - 1 < -fw.half_width())
            throw WindowTooSmall("operator image leaves the Laurent window");
        Scalar a = op.action_coeff(f, j);
        if (!a.is_zero()) out.set(j - 1, out.coeff(j - 1) + c * a);
    }
    return out;
}

inline LaurentWindow apply_op(const EulerOp& op, const LaurentWindow& fw) {
    const FieldPtr& f = fw.field();
    LaurentWindow acc(f, fw.half_width());
    for (const auto& [s, word] : op.terms) {
        LaurentWindow cur = fw;
        for (auto it = word.rbegin(); it != word.rend(); ++it) cur = apply_atomic(*it, cur);
        for (const auto& [j, c] : cur.coeffs()) acc.set(j, acc.coeff(j) + s * c);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

/// w_j w_i = p_j^{-1} p_i w_i w_j as operators on every window basis vector.
inline bool relation_check(const Scalar& pi, const Scalar& pj, const FieldPtr& f,
                           int half_width) {
    EulerOp wi = make_w(pi, f), wj = make_w(pj, f);
    EulerOp lhs = compose(wj, wi);
    EulerOp rhs = (pj.inverse() * pi) * compose(wi, wj);
    for (long k = -half_width + 2; k <= half_width; ++k) {
        LaurentWindow v = LaurentWindow::basis_vector(f, half_width, k);
        if (!(apply_op(lhs, v) == apply_op(rhs, v))) return false;
    }
    return true;
}

/// Dimension of the span of all length-n words in the generators, as linear
/// maps restricted to the window.
inline long algebra_dimension(const std::vector<EulerOp>& gens, int n, const FieldPtr& f,
                              int half_width) {
    if (n == 0) return 1;
    std::vector<EulerOp> words{gens.begin(), gens.end()};
    for (int len = 2; len <= n; ++len) {
        std::vector<EulerOp> next;
        next.reserve(words.size() * gens.size());
        for (const auto& w : words)
            for (const auto& g : gens) next.push_back(compose(w, g));
        words = std::move(next);
    }
    // each word maps y^j to a multiple of y^{j-n}; collect the coefficient
    // vectors over the usable exponents
    std::vector<SparseRow> rows;
    int colidx = 0;
    std::map<long, int> col_of;
    for (long j = -half_width + n; j <= half_width; ++j) col_of[j] = colidx++;
    for (const auto& w : words) {
        SparseRow row;
        for (long j = -half_width + n; j <= half_width; ++j) {
            LaurentWindow v = LaurentWindow::basis_vector(f, half_width, j);
            Scalar c = apply_op(w, v).coeff(j - n);
            if (!c.is_zero()) row.push(col_of[j], std::move(c));
        }
        rows.push_back(std::move(row));
    }
    return rank_of(std::move(rows), colidx);
}

struct EulerDimensionReport {
    std::vector<DegreeRow> rows; // predicted C(n+t,t) - n vs computed
    bool saturated = true;       // ranks agree across the two window sizes
    bool pass = true;
};

inline EulerDimensionReport euler_dimension_table(const std::vector<EulerOp>& gens, int t,
                                                  int nmax, const FieldPtr& f,
                                                  int half_width, int margin = 2) {
    EulerDimensionReport rep;
    for (int n = 1; n <= nmax; ++n) {
        long computed = algebra_dimension(gens, n, f, half_width);
        long again = algebra_dimension(gens, n, f, half_width + margin);
        if (computed != again) rep.saturated = false;
        long predicted = binomial(n + t, t) - n;
        bool ok = predicted == computed;
        rep.rows.push_back(DegreeRow{n, predicted, computed, ok});
        rep.pass = rep.pass && ok;
    }
    rep.pass = rep.pass && rep.saturated;
    return rep;
}

/// Relation-level surjection check: the images W_i of the x_i satisfy every
/// quadratic relation of S(phi), with the relation space computed from
/// twist_mul rather than assumed.
inline bool s_relation_surjection_check(const TwistRing& S, const std::vector<EulerOp>& images,
                                        int half_width) {
    const FieldPtr& f = S.field();
    const int t = S.t();
    const int npairs = (t + 1) * (t + 1);
    // transpose of the pair -> S_2 multiplication matrix
    std::map<int, SparseRow> transposed;
    for (int i = 0; i <= t; ++i) {
        for (int j = 0; j <= t; ++j) {
            GradedPoly prod = S.mul(GradedPoly::variable(f, t, i), GradedPoly::variable(f, t, j));
            int pair = i * (t + 1) + j;
            for (const auto& [amb, val] : prod.to_row().ents)
                transposed[amb].push(pair, val);
        }
    }
    std::vector<SparseRow> rows;
    for (auto& [amb, row] : transposed) rows.push_back(std::move(row));
    Rref rel = kernel_of_rows(std::move(rows), npairs, f);

    const long expected_rels = binomial(t + 1, 2);
    if (rel.rank() != expected_rels) return false;

    for (const auto& v : rel.rows) {
        EulerOp op;
        for (const auto& [pair, coef] : v.ents) {
            int i = pair / (t + 1), j = pair % (t + 1);
            op = op + coef * compose(images[i], images[j]);
        }
        for (long k = -half_width + 2; k <= half_width; ++k) {
            LaurentWindow b = LaurentWindow::basis_vector(f, half_width, k);
            if (!apply_op(op, b).is_zero()) return false;
        }
    }
    return true;
}

} // namespace twistlab

#endif
