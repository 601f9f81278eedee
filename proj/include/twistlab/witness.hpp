#ifndef TWISTLAB_WITNESS_HPP
#define TWISTLAB_WITNESS_HPP

/// Base extension R_B for the infinite-blowup ring B: affine orbit
/// bookkeeping for a triangularized automorphism, the blowup scalars Omega_n,
/// the elements t_n, and the symbolic pivot argument showing t_{n+1} cannot
/// lie in the left ideal generated by t_0..t_n.  Membership in B itself is
/// tracked constructively through stage tags; the unit-group fact k^x = B^x
/// is cited as a structural axiom, not computed.

#include <twistlab/subring.hpp>

namespace twistlab {

/// Scalar over the enlarged field k(y_1..y_t), tagged with the least blowup
/// stage at which the element is expressible (tracked from the generators
/// used, not re-derived).
struct ExtScalar {
    Scalar value;
    int stage = 0;

    ExtScalar operator*(const ExtScalar& o) const {
        return ExtScalar{value * o.value, std::max(stage, o.stage)};
    }
    ExtScalar operator+(const ExtScalar& o) const {
        return ExtScalar{value + o.value, std::max(stage, o.stage)};
    }
};

/// Affine data of the orbit after triangular normalization: phi lower
/// triangular with top-left entry 1, every window point inside the affine
/// patch {x_0 != 0}, and the first affine coordinates a_{i1} pairwise
/// distinct.
class AffineOrbit {
public:
    AffineOrbit(const ProjAut& phi, const ProjPoint& c, int window)
        : window_(window) {
        const FieldPtr& base = phi.field();
        const int t = phi.t();
        if (t < 2) throw std::invalid_argument("need t >= 2");

        // triangular normalization: accept lower triangular as-is, and
        // upper triangular after conjugating with the coordinate reversal
        ScalarMatrix m = phi.matrix();
        ProjPoint c2 = c;
        if (!is_lower_(m)) {
            ScalarMatrix rev = reverse_conjugate_(m, base);
            if (!is_lower_(rev)) throw NonTriangularizable();
            m = std::move(rev);
            std::vector<Scalar> rc(c.coords().rbegin(), c.coords().rend());
            c2 = ProjPoint(base, std::move(rc));
        }
        phi_ = std::make_unique<ProjAut>(base, std::move(m));
        base_field_ = base;

        std::vector<std::string> ynames;
        for (int j = 1; j <= t; ++j) ynames.push_back("y" + std::to_string(j));
        ext_field_ = extend_field(base, ynames);
        y_offset_ = base->nparams();

        for (int i = -1; i <= window_; ++i) {
            ProjPoint p = orbit_point(*phi_, c2, i);
            if (p[0].is_zero())
                throw std::invalid_argument("orbit meets the hyperplane x0 = 0");
            points_.push_back(p);
        }
        for (size_t a = 0; a < points_.size(); ++a)
            for (size_t b = a + 1; b < points_.size(); ++b)
                if (points_[a] == points_[b])
                    throw std::invalid_argument("orbit points collide inside the window");

        // first-coordinate distinctness (the blowup denominators)
        for (size_t a = 0; a < points_.size(); ++a)
            for (size_t b = a + 1; b < points_.size(); ++b)
                if (affine_coord(static_cast<int>(a) - 1, 1) ==
                    affine_coord(static_cast<int>(b) - 1, 1))
                    throw FirstCoordinateCollision();

        // lift the automorphism matrix and the orbit to the extended field
        ScalarMatrix lifted;
        for (const auto& row : phi_->matrix()) {
            std::vector<Scalar> r;
            for (const auto& e : row) r.push_back(e.lift_to(ext_field_));
            lifted.push_back(std::move(r));
        }
        phi_ext_ = std::make_unique<ProjAut>(ext_field_, std::move(lifted));
    }

    int t() const { return phi_->t(); }
    int window() const { return window_; }
    const FieldPtr& base_field() const { return base_field_; }
    const FieldPtr& ext_field() const { return ext_field_; }
    const ProjAut& phi() const { return *phi_; }
    const ProjAut& phi_ext() const { return *phi_ext_; }

    const ProjPoint& point(int i) const {
        if (i < -1 || i > window_) throw WindowTooSmall("affine orbit index outside window");
        return points_[i + 1];
    }

    std::vector<Scalar> point_ext_coords(int i) const {
        std::vector<Scalar> out;
        for (const auto& cc : point(i).coords()) out.push_back(cc.lift_to(ext_field_));
        return out;
    }

    /// a_{ij}: the j-th affine coordinate of c_i (j in 1..t), over the base
    /// field.
    Scalar affine_coord(int i, int j) const {
        const ProjPoint& p = point(i);
        return p[j] / p[0];
    }

    Scalar y_param(int j) const { return Scalar::param(ext_field_, y_offset_ + j - 1); }

    /// f = y1 x0 - x1 over the extended scalars.
    GradedPoly f_form() const { return linear_form_(1); }
    /// g = y2 x0 - x2 over the extended scalars.
    GradedPoly g_form() const { return linear_form_(2); }

    bool ext_scalar_in_base(const Scalar& s) const {
        for (int j = 0; j < t(); ++j)
            if (s.uses_param(y_offset_ + j)) return false;
        return true;
    }

private:
    static bool is_lower_(const ScalarMatrix& m) {
        for (size_t i = 0; i < m.size(); ++i)
            for (size_t j = i + 1; j < m.size(); ++j)
                if (!m[i][j].is_zero()) return false;
        return true;
    }

    static ScalarMatrix reverse_conjugate_(const ScalarMatrix& m, const FieldPtr& f) {
        const size_t n = m.size();
        ScalarMatrix out;
        for (size_t i = 0; i < n; ++i) {
            std::vector<Scalar> row;
            for (size_t j = 0; j < n; ++j) row.push_back(m[n - 1 - i][n - 1 - j]);
            out.push_back(std::move(row));
        }
        (void)f;
        return out;
    }

    GradedPoly linear_form_(int j) const {
        GradedPoly g(ext_field_, t(), 1);
        Exps e0(t() + 1, 0);
        e0[0] = 1;
        g.add_term(e0, y_param(j));
        Exps ej(t() + 1, 0);
        ej[j] = 1;
        g.add_term(ej, -Scalar::one(ext_field_));
        return g;
    }

    int window_;
    FieldPtr base_field_, ext_field_;
    std::unique_ptr<ProjAut> phi_, phi_ext_;
    std::vector<ProjPoint> points_; // indices -1..window
    int y_offset_ = 0;
};

inline AffineOrbit setup_affine(const ProjAut& phi, const ProjPoint& c, int window) {
    return AffineOrbit(phi, c, window);
}

/// Omega_i = g(c_i)/f(c_i) = (y2 - a_{i2})/(y1 - a_{i1}), expressible at
/// blowup stage i+1.
inline ExtScalar omega(const AffineOrbit& orb, int i) {
    Scalar y1 = orb.y_param(1), y2 = orb.y_param(2);
    Scalar a1 = orb.affine_coord(i, 1).lift_to(orb.ext_field());
    Scalar a2 = orb.affine_coord(i, 2).lift_to(orb.ext_field());
    return ExtScalar{(y2 - a2) / (y1 - a1), i + 1};
}

/// theta_n: a degree-n form over the base field with theta_n(c_i) = 0 for
/// -1 <= i <= n-2 and theta_n(c_{n-1}) != 0; theta_0 = 1.  Deterministic
/// choice: the first canonical-RREF kernel vector that is nonzero at c_{n-1}.
inline GradedPoly theta(const AffineOrbit& orb, int n) {
    const FieldPtr& f = orb.base_field();
    const int t = orb.t();
    if (n == 0) return GradedPoly::one(f, t);
    if (n - 1 > orb.window()) throw WindowTooSmall("theta needs orbit up to n-1");
    std::vector<ProjPoint> pts;
    for (int i = -1; i <= n - 2; ++i) pts.push_back(orb.point(i));
    Subspace V = vanishing_subspace(pts, n, f, t);
    for (const auto& g : V.basis_polys())
        if (!g.eval(orb.point(n - 1).coords()).is_zero()) return g;
    throw std::runtime_error("no theta with the required nonvanishing exists");
}

/// t_n = phi(theta_n) . (Omega_n f - g), homogeneous of degree n+1 over the
/// extended scalars.
struct WitnessElement {
    int n = 0;
    GradedPoly theta_n;  // over the base field
    ExtScalar omega_n;
    GradedPoly t_n;      // over the extended field
};

inline WitnessElement witness_element(const AffineOrbit& orb, int n) {
    GradedPoly th = theta(orb, n);
    ExtScalar om = omega(orb, n);
    GradedPoly lin = om.value * orb.f_form() - orb.g_form();
    GradedPoly th_ext(orb.ext_field(), orb.t(), th.degree());
    for (const auto& [e, c] : th.terms()) th_ext.add_term(e, c.lift_to(orb.ext_field()));
    GradedPoly tn = apply_aut(orb.phi_ext(), th_ext, 1) * lin;
    return WitnessElement{n, std::move(th), std::move(om), std::move(tn)};
}

struct MembershipReport {
    int n = 0;
    bool member = true;           // t_n satisfies the (R_B)_{n+1} criterion
    bool degree_ok = true;
    bool depends_on_y = false;    // t_n is not in R tensored with the base
    int stage = 0;
    bool pass() const { return member && degree_ok && depends_on_y; }
};

/// Verifies t_n in (R_B)_{n+1} through the vanishing criterion at c_0..c_n.
inline MembershipReport t_membership(const AffineOrbit& orb, int n) {
    if (n + 1 > orb.window() + 1 || n > orb.window())
        throw WindowTooSmall("t_membership needs orbit up to n");
    MembershipReport rep;
    rep.n = n;
    WitnessElement w = witness_element(orb, n);
    rep.degree_ok = w.t_n.degree() == n + 1;
    rep.stage = w.omega_n.stage;
    for (int i = 0; i <= n; ++i) {
        Scalar v = w.t_n.eval(orb.point_ext_coords(i));
        if (!v.is_zero()) rep.member = false;
    }
    for (const auto& [e, c] : w.t_n.terms())
        if (!orb.ext_scalar_in_base(c)) rep.depends_on_y = true;
    return rep;
}

struct PivotReport {
    int n = 0;
    bool r_terms_vanish = true;    // (a): [phi^{i+1}(r_i)](c_{n+1}) = 0 for all i
    bool pivot_in_unit_class = true; // (b): h(c_{n+1}) = Omega_{n+1} u, u in k^x
    bool u_matches_theta = true;   // u equals [phi(theta_{n+1})](c_{n+1}) exactly
    bool forms_coprime = true;     // (c): gcd(f, g) = 1
    bool unit_axiom_cited = true;  // k^x = B^x is cited, not computed
    bool pass() const {
        return r_terms_vanish && pivot_in_unit_class && u_matches_theta && forms_coprime;
    }
};

/// The pivot of the non-noetherian argument, run symbolically: candidate
/// coefficients r_i in (R_B)_{n+1-i} are introduced as fresh indeterminates,
/// h = Omega_{n+1} phi(theta_{n+1}) - sum_i Omega_i phi^{i+1}(r_i) . phi(theta_i)
/// is formed, and h(c_{n+1}) is shown to land in Omega_{n+1} k^x whatever the
/// indeterminates are.  Any solution over B would force f(c_{n+1}) to be a
/// unit, contradicting the cited unit-group axiom.
inline PivotReport pivot_check(const AffineOrbit& orb, int n) {
    if (n + 1 > orb.window()) throw WindowTooSmall("pivot_check needs orbit up to n+1");
    PivotReport rep;
    rep.n = n;
    const FieldPtr& base = orb.base_field();
    const int t = orb.t();

    // R over the conjugated data, for basis extraction
    SubringCtx ctx(TwistRing(base, orb.phi()), orb.point(0), n + 2);

    // big field: base params, y_1..y_t, then one lambda per basis element
    std::vector<std::string> extra;
    for (int j = 1; j <= t; ++j) extra.push_back("y" + std::to_string(j));
    std::vector<std::vector<std::string>> lam_names(n + 1);
    std::vector<std::vector<GradedPoly>> bases(n + 1);
    for (int i = 0; i <= n; ++i) {
        bases[i] = ctx.r_piece_closed(n + 1 - i).basis_polys();
        for (size_t j = 0; j < bases[i].size(); ++j) {
            lam_names[i].push_back("l_" + std::to_string(i) + "_" + std::to_string(j));
            extra.push_back(lam_names[i].back());
        }
    }
    FieldPtr big = extend_field(base, extra);

    auto lift_poly = [&](const GradedPoly& g) {
        GradedPoly out(big, t, g.degree());
        for (const auto& [e, c] : g.terms()) out.add_term(e, c.lift_to(big));
        return out;
    };
    ScalarMatrix lifted;
    for (const auto& row : orb.phi().matrix()) {
        std::vector<Scalar> r;
        for (const auto& e : row) r.push_back(e.lift_to(big));
        lifted.push_back(std::move(r));
    }
    ProjAut phi_big(big, std::move(lifted));
    auto point_big = [&](int i) {
        std::vector<Scalar> out;
        for (const auto& cc : orb.point(i).coords()) out.push_back(cc.lift_to(big));
        return out;
    };
    auto omega_big = [&](int i) {
        Scalar y1 = Scalar::param(big, "y1"), y2 = Scalar::param(big, "y2");
        Scalar a1 = orb.affine_coord(i, 1).lift_to(big);
        Scalar a2 = orb.affine_coord(i, 2).lift_to(big);
        return (y2 - a2) / (y1 - a1);
    };

    // (a) every r-dependent contribution to h(c_{n+1}) vanishes
    for (int i = 0; i <= n; ++i)
        for (const auto& b : bases[i]) {
            Scalar v = apply_aut(phi_big, lift_poly(b), i + 1).eval(point_big(n + 1));
            if (!v.is_zero()) rep.r_terms_vanish = false;
        }

    // assemble h symbolically
    GradedPoly h = omega_big(n + 1) * apply_aut(phi_big, lift_poly(theta(orb, n + 1)), 1);
    for (int i = 0; i <= n; ++i) {
        GradedPoly r_i = GradedPoly::zero(big, t, n + 1 - i);
        for (size_t j = 0; j < bases[i].size(); ++j)
            r_i = r_i + Scalar::param(big, lam_names[i][j]) * lift_poly(bases[i][j]);
        GradedPoly term = apply_aut(phi_big, r_i, i + 1) *
                          apply_aut(phi_big, lift_poly(theta(orb, i)), 1);
        h = h - omega_big(i) * term;
    }

    // (b) h(c_{n+1}) = Omega_{n+1} u with u in k^x, u = [phi(theta_{n+1})](c_{n+1})
    Scalar hv = h.eval(point_big(n + 1));
    Scalar u = hv / omega_big(n + 1);
    Scalar expect_u =
        apply_aut(phi_big, lift_poly(theta(orb, n + 1)), 1).eval(point_big(n + 1));
    bool u_in_base = !u.is_zero() && u.free_of_params_from(base->nparams());
    rep.pivot_in_unit_class = u_in_base;
    rep.u_matches_theta = u == expect_u;

    // (c) f and g are non-proportional linear forms with unit content
    {
        Scalar y1 = Scalar::param(big, "y1"), y2 = Scalar::param(big, "y2");
        std::vector<SparseRow> rows(2);
        rows[0].push(0, y1);
        rows[0].push(1, -Scalar::one(big));
        rows[1].push(0, y2);
        rows[1].push(2, -Scalar::one(big));
        rep.forms_coprime = rank_of(std::move(rows), t + 1) == 2;
    }
    return rep;
}

} // namespace twistlab

#endif
