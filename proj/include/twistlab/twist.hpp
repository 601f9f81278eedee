#ifndef TWISTLAB_TWIST_HPP
#define TWISTLAB_TWIST_HPP

/// The twisted ring S = S(phi): same graded vector space as U, product
/// f * g = phi^{deg g}(f) . g, together with left ideals and point-module
/// point sequences computed from first principles.

#include <twistlab/projgeo.hpp>

namespace twistlab {

/// S(phi) for a fixed automorphism of P^t, t >= 2.
class TwistRing {
public:
    TwistRing(FieldPtr field, ProjAut phi)
        : field_(std::move(field)), phi_(std::move(phi)) {
        if (phi_.t() < 2) throw std::invalid_argument("TwistRing needs t >= 2");
    }

    const FieldPtr& field() const { return field_; }
    int t() const { return phi_.t(); }
    const ProjAut& phi() const { return phi_; }

    GradedPoly mul(const GradedPoly& f, const GradedPoly& g) const {
        return apply_aut(phi_, f, g.degree()) * g;
    }

private:
    FieldPtr field_;
    ProjAut phi_;
};

inline GradedPoly twist_mul(const TwistRing& S, const GradedPoly& f, const GradedPoly& g) {
    return S.mul(f, g);
}

/// Degree-d piece of the left ideal sum S.g_j: for a single generator of
/// degree n this is phi^n(S_{d-n}) . g = U_{d-n} . g.
inline Subspace left_ideal_piece(const TwistRing& S, const std::vector<GradedPoly>& gens,
                                 int d) {
    const FieldPtr& f = S.field();
    const int t = S.t();
    std::vector<SparseRow> rows;
    for (const auto& g : gens) {
        if (g.degree() > d) continue;
        for (const auto& mono : monomial_basis(t, d - g.degree())) {
            GradedPoly m = GradedPoly::monomial(f, t, mono, Scalar::one(f));
            rows.push_back(S.mul(m, g).to_row());
        }
    }
    const int ncols = static_cast<int>(monomial_basis(t, d).size());
    return Subspace(f, t, d, rref(std::move(rows), ncols));
}

/// Degree-d piece of the left ideal generated inside a graded subring whose
/// pieces are supplied by `coeff_piece` (degree -> Subspace of U_m).  This is
/// the span of the twisted products r * g over r in the coefficient piece.
template <typename PieceFn>
inline Subspace left_ideal_piece_in(const TwistRing& S, PieceFn&& coeff_piece,
                                    const std::vector<GradedPoly>& gens, int d) {
    const FieldPtr& f = S.field();
    const int t = S.t();
    std::vector<SparseRow> rows;
    for (const auto& g : gens) {
        if (g.degree() > d) continue;
        Subspace coeff = coeff_piece(d - g.degree());
        for (const auto& r : coeff.basis_polys())
            rows.push_back(S.mul(r, g).to_row());
    }
    const int ncols = static_cast<int>(monomial_basis(t, d).size());
    return Subspace(f, t, d, rref(std::move(rows), ncols));
}

/// Entry n of the point sequence of the point module S/m_d, computed from
/// first principles as the common zero of the annihilator of the degree-n
/// piece in S_1.
inline ProjPoint point_sequence_entry(const TwistRing& S, const ProjPoint& d, int n) {
    const FieldPtr& f = S.field();
    const int t = S.t();
    // f in S_1 kills (S/m_d)_n iff twist_mul(f, u) vanishes at d for every
    // monomial u of degree n
    std::vector<SparseRow> cond;
    for (const auto& mono : monomial_basis(t, n)) {
        GradedPoly u = GradedPoly::monomial(f, t, mono, Scalar::one(f));
        SparseRow row;
        for (int i = 0; i <= t; ++i) {
            GradedPoly xi = GradedPoly::variable(f, t, i);
            Scalar v = S.mul(xi, u).eval(d.coords());
            row.push(i, std::move(v));
        }
        cond.push_back(std::move(row));
    }
    Rref ann = kernel_of_rows(std::move(cond), t + 1, f);
    // ann is the ideal piece of a single point; recover the point as the
    // common zero of those linear forms
    if (ann.rank() != t)
        throw std::runtime_error("point sequence: annihilator is not a point ideal piece");
    std::vector<SparseRow> forms = ann.rows;
    Rref pt = kernel_of_rows(std::move(forms), t + 1, f);
    if (pt.rank() != 1) throw std::runtime_error("point sequence: no unique common zero");
    std::vector<Scalar> coords;
    for (int i = 0; i <= t; ++i) {
        const Scalar* e = pt.rows[0].find(i);
        coords.push_back(e ? *e : Scalar::zero(f));
    }
    return ProjPoint(f, std::move(coords));
}

/// First `len` entries of the point sequence of P(d).
inline std::vector<ProjPoint> point_sequence(const TwistRing& S, const ProjPoint& d, int len) {
    if (len < 1) throw std::invalid_argument("point_sequence: len >= 1");
    std::vector<ProjPoint> out;
    out.reserve(len);
    for (int n = 0; n < len; ++n) out.push_back(point_sequence_entry(S, d, n));
    return out;
}

} // namespace twistlab

#endif
