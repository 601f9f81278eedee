#ifndef TWISTLAB_SUBRING_HPP
#define TWISTLAB_SUBRING_HPP

/// The subalgebra R(phi,c) of S(phi) generated by the linear forms through c:
/// graded pieces two ways, Hilbert data, the T^B/M^B module calculus,
/// point-ideal families and truncation collisions, and the opposite-ring
/// anti-isomorphism check.

#include <twistlab/twist.hpp>

#include <random>

namespace twistlab {

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

struct DegreeRow {
    int degree = 0;
    long predicted = 0;
    long computed = 0;
    bool pass = false;
};

struct CheckReport {
    std::string name;
    bool pass = true;
    std::vector<DegreeRow> rows;
    std::vector<std::pair<std::string, std::string>> notes;

    void add_row(int degree, long predicted, long computed) {
        bool ok = predicted == computed;
        rows.push_back(DegreeRow{degree, predicted, computed, ok});
        pass = pass && ok;
    }
    void require(bool ok, const std::string& what) {
        if (!ok) notes.emplace_back("failed", what);
        pass = pass && ok;
    }
    void note(const std::string& k, const std::string& v) { notes.emplace_back(k, v); }
};

/// Finite B subset of N together with the window inside which all degreewise
/// statements are checked.
struct IndexSet {
    std::vector<int> members; // sorted, within [0, window)
    int window = 0;

    IndexSet() = default;
    IndexSet(std::vector<int> m, int w) : members(std::move(m)), window(w) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (int x : members)
            if (x < 0 || x >= w)
                throw std::invalid_argument("IndexSet member outside [0, window)");
    }

    bool contains(int i) const {
        return std::binary_search(members.begin(), members.end(), i);
    }

    /// |A_n intersect B| with A_n = {0, ..., n-1}.
    long count_below(int n) const {
        long c = 0;
        for (int x : members)
            if (x < n) ++c;
        return c;
    }

    IndexSet complement() const {
        std::vector<int> out;
        for (int i = 0; i < window; ++i)
            if (!contains(i)) out.push_back(i);
        return IndexSet(std::move(out), window);
    }
};

// ---------------------------------------------------------------------------
// SubringCtx
// ---------------------------------------------------------------------------

/// Immutable context for R(phi,c): the ambient twist ring, the base point,
/// and the orbit cache c_i = phi^{-i}(c) for |i| <= window.  The cached
/// points must be pairwise distinct.
class SubringCtx {
public:
    SubringCtx(TwistRing S, ProjPoint c, int window)
        : S_(std::move(S)), c_(std::move(c)), window_(window) {
        for (int i = -window_; i <= window_; ++i)
            orbit_.push_back(orbit_point(S_.phi(), c_, i));
        for (size_t a = 0; a < orbit_.size(); ++a)
            for (size_t b = a + 1; b < orbit_.size(); ++b)
                if (orbit_[a] == orbit_[b])
                    throw std::invalid_argument(
                        "orbit points collide inside the window; R(phi,c) needs "
                        "distinct c_i");
    }

    const TwistRing& S() const { return S_; }
    const FieldPtr& field() const { return S_.field(); }
    int t() const { return S_.t(); }
    int window() const { return window_; }
    const ProjPoint& c() const { return c_; }

    const ProjPoint& orbit(int i) const {
        if (i < -window_ || i > window_) throw WindowTooSmall("orbit index outside window");
        return orbit_[i + window_];
    }

    /// Closed-form graded piece: forms of degree n vanishing at c_0..c_{n-1}.
    Subspace r_piece_closed(int n) const {
        if (n > window_) throw WindowTooSmall("r_piece_closed beyond window");
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = closed_.find(n);
        if (it != closed_.end()) return it->second;
        std::vector<ProjPoint> pts;
        for (int i = 0; i < n; ++i) pts.push_back(orbit(i));
        Subspace s = vanishing_subspace(pts, n, field(), t());
        closed_.emplace(n, s);
        return s;
    }

    /// Generated graded piece: the span of all n-fold twisted products of
    /// V = (m_c)_1, built iteratively as phi(R_{n-1}) . V.
    Subspace r_piece_generated(int n) const {
        std::lock_guard<std::mutex> lock(mtx_);
        return gen_piece_nolock_(n);
    }

    /// (T^B)_n = {f in S_n : f(c_i) = 0 for i in A_n \ B}.
    Subspace t_module_piece(const IndexSet& B, int n) const {
        if (n > window_) throw WindowTooSmall("t_module_piece beyond window");
        std::vector<ProjPoint> pts;
        for (int i = 0; i < n; ++i)
            if (!B.contains(i)) pts.push_back(orbit(i));
        return vanishing_subspace(pts, n, field(), t());
    }

    Scalar eval_at_orbit(const GradedPoly& f, int i) const {
        return f.eval(orbit(i).coords());
    }

    /// D = {i in [0, window] : f(c_i) = 0}.
    std::vector<int> vanishing_orbit_indices(const GradedPoly& f) const {
        std::vector<int> D;
        for (int i = 0; i <= window_; ++i)
            if (eval_at_orbit(f, i).is_zero()) D.push_back(i);
        return D;
    }

private:
    Subspace gen_piece_nolock_(int n) const {
        auto it = gen_.find(n);
        if (it != gen_.end()) return it->second;
        Subspace s = [&] {
            if (n == 0) return Subspace::full(field(), t(), 0);
            if (n == 1)
                return vanishing_subspace(std::vector<ProjPoint>{c_}, 1, field(), t());
            Subspace prev = gen_piece_nolock_(n - 1);
            Subspace V = gen_piece_nolock_(1);
            std::vector<SparseRow> rows;
            for (const auto& a : prev.basis_polys()) {
                GradedPoly pa = apply_aut(S_.phi(), a, 1);
                for (const auto& v : V.basis_polys()) rows.push_back((pa * v).to_row());
            }
            const int ncols = static_cast<int>(monomial_basis(t(), n).size());
            return Subspace(field(), t(), n, rref(std::move(rows), ncols));
        }();
        gen_.emplace(n, s);
        return s;
    }

    TwistRing S_;
    ProjPoint c_;
    int window_;
    std::vector<ProjPoint> orbit_;
    mutable std::map<int, Subspace> closed_;
    mutable std::map<int, Subspace> gen_;
    mutable std::mutex mtx_;
};

// ---------------------------------------------------------------------------
// Module calculus reports
// ---------------------------------------------------------------------------

/// dim (M^B)_n = |A_n intersect B| degreewise, plus the extreme cases
/// T^empty = R and T^window = S.
inline CheckReport m_hilbert_check(const SubringCtx& ctx, const IndexSet& B, int max_degree) {
    CheckReport rep;
    rep.name = "module-hilbert";
    for (int n = 0; n <= max_degree; ++n) {
        long computed = ctx.t_module_piece(B, n).dim() - ctx.r_piece_closed(n).dim();
        rep.add_row(n, B.count_below(n), computed);
    }
    return rep;
}

/// Per degree: the sum of the (T^{{j}})_n over j in B is direct modulo R_n
/// and spans (T^B)_n.
inline CheckReport m_decomposition_check(const SubringCtx& ctx, const IndexSet& B,
                                         int max_degree) {
    CheckReport rep;
    rep.name = "module-decomposition";
    for (int n = 0; n <= max_degree; ++n) {
        Subspace acc = ctx.r_piece_closed(n);
        long expected = acc.dim();
        for (int j : B.members) {
            IndexSet single({j}, B.window);
            acc = acc.sum(ctx.t_module_piece(single, n));
            expected += single.count_below(n);
        }
        // directness: the dimension of the sum matches the sum of dimensions
        rep.add_row(n, expected, acc.dim());
        Subspace tb = ctx.t_module_piece(B, n);
        rep.require(acc == tb, "sum of singletons spans (T^B)_n at n=" + std::to_string(n));
    }
    return rep;
}

/// Deterministic coset generator of M^{{j}} in degree j+1: the first RREF
/// basis vector of (T^{{j}})_{j+1} outside R_{j+1}.
inline GradedPoly m_single_generator(const SubringCtx& ctx, int j) {
    IndexSet single({j}, ctx.window());
    Subspace T = ctx.t_module_piece(single, j + 1);
    Subspace R = ctx.r_piece_closed(j + 1);
    for (const auto& g : T.basis_polys())
        if (!R.contains(g)) return g;
    throw std::runtime_error("M^{j} has no generator in degree j+1");
}

/// ann_{R_n}(generator of M^{{j}}) computed degreewise and compared with
/// (m_{c_{-1}} cap R)_n.
inline CheckReport one_point_annihilator(const SubringCtx& ctx, int j, int max_degree) {
    CheckReport rep;
    rep.name = "one-point-annihilator";
    const FieldPtr& f = ctx.field();
    const int t = ctx.t();
    const int m = j + 1;
    GradedPoly g = m_single_generator(ctx, j);

    for (int n = 0; n <= max_degree; ++n) {
        // Hilbert of M^{{j}}
        IndexSet single({j}, ctx.window());
        long mdim = ctx.t_module_piece(single, n).dim() - ctx.r_piece_closed(n).dim();
        rep.add_row(n, n > j ? 1 : 0, mdim);
        if (n == 0 || n + m > ctx.window()) continue;

        Subspace Rn = ctx.r_piece_closed(n);
        Subspace Rnm = ctx.r_piece_closed(n + m);
        auto basis = Rn.basis_polys();
        // residuals of b_k * g modulo R_{n+m}; the kernel over the
        // coefficients mu_k is the annihilator
        std::vector<SparseRow> cols;
        for (const auto& b : basis)
            cols.push_back(reduce_against(Rnm.basis(), ctx.S().mul(b, g).to_row()));
        std::map<int, SparseRow> transposed;
        for (size_t k = 0; k < cols.size(); ++k)
            for (const auto& [amb, val] : cols[k].ents)
                transposed[amb].push(static_cast<int>(k), val);
        std::vector<SparseRow> cond;
        for (auto& [amb, row] : transposed) cond.push_back(std::move(row));
        Rref mu = kernel_of_rows(std::move(cond), static_cast<int>(basis.size()), f);

        std::vector<SparseRow> ann_rows;
        for (const auto& v : mu.rows) {
            GradedPoly combo = GradedPoly::zero(f, t, n);
            for (const auto& [k, coef] : v.ents) combo = combo + coef * basis[k];
            ann_rows.push_back(combo.to_row());
        }
        Subspace ann(f, t, n, rref(std::move(ann_rows), Rn.ambient_dim()));
        Subspace target = Rn.intersect(
            vanishing_subspace(std::vector<ProjPoint>{ctx.orbit(-1)}, n, f, t));
        rep.require(ann == target,
                    "annihilator equals (m_{c_-1} cap R)_n at n=" + std::to_string(n));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Subfactors of S/R
// ---------------------------------------------------------------------------

struct SubfactorReport {
    std::vector<int> vanishing_set;  // D within the window
    std::vector<int> predicted_set;  // B for the first type, D for the second
    std::vector<DegreeRow> rows;
    bool pass = true;
    std::vector<std::pair<std::string, std::string>> notes;

    void add_row(int degree, long predicted, long computed) {
        bool ok = predicted == computed;
        rows.push_back(DegreeRow{degree, predicted, computed, ok});
        pass = pass && ok;
    }
};

inline Subspace principal_left_ideal_piece(const SubringCtx& ctx, const GradedPoly& fgen,
                                           int m) {
    // (Sf)_m stored as the commutative span U_{m-n} . f (the twisted and
    // commutative spans agree; the twist module's tests prove it)
    const FieldPtr& f = ctx.field();
    const int t = ctx.t();
    const int n = fgen.degree();
    if (m < n) return Subspace::zero_space(f, t, m);
    std::vector<SparseRow> rows;
    for (const auto& mono : monomial_basis(t, m - n))
        rows.push_back((GradedPoly::monomial(f, t, mono, Scalar::one(f)) * fgen).to_row());
    const int ncols = static_cast<int>(monomial_basis(t, m).size());
    return Subspace(f, t, m, rref(std::move(rows), ncols));
}

inline Subspace r_multiple_piece(const SubringCtx& ctx, const GradedPoly& fgen, int m) {
    // (Rf)_m = span of r * f over r in R_{m-n}
    const FieldPtr& f = ctx.field();
    const int t = ctx.t();
    const int n = fgen.degree();
    if (m < n) return Subspace::zero_space(f, t, m);
    std::vector<SparseRow> rows;
    for (const auto& r : ctx.r_piece_closed(m - n).basis_polys())
        rows.push_back(ctx.S().mul(r, fgen).to_row());
    const int ncols = static_cast<int>(monomial_basis(t, m).size());
    return Subspace(f, t, m, rref(std::move(rows), ncols));
}

/// N = (Sf cap R)/Rf: computes D and B = (D-n) cap N, then verifies
/// dim N_m = |A_{m-n} cap B| degreewise.
inline SubfactorReport subfactor_first_type(const SubringCtx& ctx, const GradedPoly& fgen,
                                            int max_degree) {
    const int n = fgen.degree();
    if (!ctx.r_piece_closed(n).contains(fgen)) throw NotInSubring();
    SubfactorReport rep;
    rep.vanishing_set = ctx.vanishing_orbit_indices(fgen);
    for (int d : rep.vanishing_set)
        if (d >= n) rep.predicted_set.push_back(d - n);
    IndexSet B(rep.predicted_set, ctx.window() + 1);
    for (int m = n; m <= max_degree; ++m) {
        Subspace Sf = principal_left_ideal_piece(ctx, fgen, m);
        Subspace Rf = r_multiple_piece(ctx, fgen, m);
        Subspace inter = Sf.intersect(ctx.r_piece_closed(m));
        if (!inter.contains_space(Rf)) {
            rep.pass = false;
            rep.notes.emplace_back("failed", "Rf not inside Sf cap R at m=" + std::to_string(m));
        }
        rep.add_row(m, B.count_below(m - n), inter.dim() - Rf.dim());
    }
    return rep;
}

/// M = S/(R + Sf): verifies dim M_m = |A_m cap D| and the intermediate
/// identity R + Sf = T^{N \ D} degreewise.
inline SubfactorReport subfactor_second_type(const SubringCtx& ctx, const GradedPoly& fgen,
                                             int max_degree) {
    const int n = fgen.degree();
    if (!ctx.r_piece_closed(n).contains(fgen)) throw NotInSubring();
    SubfactorReport rep;
    rep.vanishing_set = ctx.vanishing_orbit_indices(fgen);
    rep.predicted_set = rep.vanishing_set;
    IndexSet D(rep.vanishing_set, ctx.window() + 1);
    for (int m = 0; m <= max_degree; ++m) {
        Subspace RSf = ctx.r_piece_closed(m).sum(principal_left_ideal_piece(ctx, fgen, m));
        long ambient = RSf.ambient_dim();
        rep.add_row(m, D.count_below(m), ambient - RSf.dim());
        // R + Sf = T^{N \ D} piecewise
        std::vector<ProjPoint> pts;
        for (int i = 0; i < m; ++i)
            if (D.contains(i)) pts.push_back(ctx.orbit(i));
        Subspace tb = vanishing_subspace(pts, m, ctx.field(), ctx.t());
        if (!(RSf == tb)) {
            rep.pass = false;
            rep.notes.emplace_back("failed", "R + Sf != T^{N\\D} at m=" + std::to_string(m));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Point ideal families and truncation collisions
// ---------------------------------------------------------------------------

struct FamilyReport {
    int i = 0;
    bool closure_pass = true;
    bool profile_pass = true;
    int family_dim = 0;
    std::vector<DegreeRow> profile; // dim (R/J)_n
    std::vector<GradedPoly> family_space; // coset representatives spanning (R/J)_{i+1}
    bool pass() const { return closure_pass && profile_pass; }
};

/// J^{(i)}_n: (R cap m_{c_i})_n for n <= i, (R cap m_{c_i}^2)_n for n > i.
inline Subspace point_ideal_j_piece(const SubringCtx& ctx, int i, int n) {
    std::vector<FatPoint> pts;
    bool seen_ci = false;
    for (int k = 0; k < n; ++k) {
        if (k == i) {
            pts.push_back(FatPoint{ctx.orbit(k), n <= i ? 1 : 2});
            seen_ci = true;
        } else {
            pts.push_back(FatPoint{ctx.orbit(k), 1});
        }
    }
    if (!seen_ci) pts.push_back(FatPoint{ctx.orbit(i), n <= i ? 1 : 2});
    return vanishing_subspace(pts, n, ctx.field(), ctx.t());
}

inline FamilyReport point_ideal_family(const SubringCtx& ctx, int i, int max_degree) {
    FamilyReport rep;
    rep.i = i;
    const int t = ctx.t();
    std::vector<Subspace> J;
    for (int n = 0; n <= max_degree; ++n) J.push_back(point_ideal_j_piece(ctx, i, n));

    for (int n = 0; n <= max_degree; ++n) {
        long predicted = n <= i ? 1 : t;
        long computed = ctx.r_piece_closed(n).dim() - J[n].dim();
        bool ok = predicted == computed;
        rep.profile.push_back(DegreeRow{n, predicted, computed, ok});
        rep.profile_pass = rep.profile_pass && ok;
    }

    // left-ideal closure R_1 . J_n inside J_{n+1}
    Subspace R1 = ctx.r_piece_closed(1);
    for (int n = 0; n < max_degree; ++n) {
        for (const auto& r : R1.basis_polys()) {
            for (const auto& jn : J[n].basis_polys()) {
                if (!J[n + 1].contains(ctx.S().mul(r, jn))) {
                    rep.closure_pass = false;
                }
            }
        }
    }

    // coset representatives of (R/J)_{i+1}
    if (i + 1 <= max_degree) {
        Rref acc = J[i + 1].basis();
        const int ncols = J[i + 1].ambient_dim();
        for (const auto& p : ctx.r_piece_closed(i + 1).basis_polys()) {
            if (!in_row_space(acc, p.to_row())) {
                rep.family_space.push_back(p);
                std::vector<SparseRow> rows = acc.rows;
                rows.push_back(p.to_row());
                acc = rref(std::move(rows), ncols);
            }
        }
        rep.family_dim = static_cast<int>(rep.family_space.size());
    }
    return rep;
}

/// Degreewise pieces of the point ideal J + R.L for the family member whose
/// degree-(i+1) piece is L.
inline std::vector<Subspace> family_member_pieces(const SubringCtx& ctx, int i,
                                                  const Subspace& L, int max_degree) {
    std::vector<Subspace> I;
    for (int n = 0; n <= max_degree; ++n) {
        if (n <= i) {
            I.push_back(point_ideal_j_piece(ctx, i, n));
        } else if (n == i + 1) {
            I.push_back(L);
        } else {
            Subspace piece = point_ideal_j_piece(ctx, i, n);
            std::vector<SparseRow> rows = piece.basis().rows;
            for (const auto& r : ctx.r_piece_closed(n - i - 1).basis_polys())
                for (const auto& l : L.basis_polys())
                    rows.push_back(ctx.S().mul(r, l).to_row());
            I.push_back(Subspace(ctx.field(), ctx.t(), n,
                                 rref(std::move(rows), piece.ambient_dim())));
        }
    }
    return I;
}

/// A family member from a functional e on the family space: L is spanned by
/// J_{i+1} and the kernel of e against the coset representatives.
inline Subspace family_member_top(const SubringCtx& ctx, int i,
                                  const FamilyReport& fam,
                                  const std::vector<Scalar>& e) {
    const FieldPtr& f = ctx.field();
    if (e.size() != fam.family_space.size())
        throw std::invalid_argument("functional size must match family dimension");
    SparseRow row;
    for (size_t k = 0; k < e.size(); ++k) row.push(static_cast<int>(k), e[k]);
    Rref ker = kernel_of_rows({row}, static_cast<int>(e.size()), f);
    Subspace J = point_ideal_j_piece(ctx, i, i + 1);
    std::vector<SparseRow> rows = J.basis().rows;
    for (const auto& v : ker.rows) {
        GradedPoly combo = GradedPoly::zero(f, ctx.t(), i + 1);
        for (const auto& [k, coef] : v.ents) combo = combo + coef * fam.family_space[k];
        rows.push_back(combo.to_row());
    }
    return Subspace(f, ctx.t(), i + 1, rref(std::move(rows), J.ambient_dim()));
}

struct CollisionReport {
    int i = 0;
    int agree_through = -1;       // pieces equal for all degrees <= this
    int first_difference = -1;    // first degree where the two ideals differ
    bool hilbert_certified = true; // both ideals have the point-ideal profile
    bool containment_pass = true;  // both contain (R cap m^2) degreewise
    bool pass = false;
};

/// Two distinct members of the degree-i family whose graded pieces agree in
/// all degrees <= i: the mechanism behind the failure of the strong
/// noetherian property.
inline CollisionReport truncation_collision(const SubringCtx& ctx, int i, int max_degree) {
    CollisionReport rep;
    rep.i = i;
    const FieldPtr& f = ctx.field();
    FamilyReport fam = point_ideal_family(ctx, i, std::min(max_degree, i + 1));
    if (fam.family_dim < 2)
        throw std::runtime_error("family has fewer than 2 directions; need t >= 2");

    std::vector<Scalar> e1, e2;
    for (int k = 0; k < fam.family_dim; ++k) {
        e1.push_back(k == 0 ? Scalar::one(f) : Scalar::zero(f));
        e2.push_back(k == 1 ? Scalar::one(f) : Scalar::zero(f));
    }
    Subspace L1 = family_member_top(ctx, i, fam, e1);
    Subspace L2 = family_member_top(ctx, i, fam, e2);
    std::vector<Subspace> I1 = family_member_pieces(ctx, i, L1, max_degree);
    std::vector<Subspace> I2 = family_member_pieces(ctx, i, L2, max_degree);

    rep.agree_through = -1;
    for (int n = 0; n <= max_degree; ++n) {
        if (I1[n] == I2[n]) {
            if (rep.first_difference < 0) rep.agree_through = n;
        } else if (rep.first_difference < 0) {
            rep.first_difference = n;
        }
    }
    for (int n = 0; n <= max_degree; ++n) {
        long expect = ctx.r_piece_closed(n).dim() - 1;
        if (I1[n].dim() != expect || I2[n].dim() != expect) rep.hilbert_certified = false;
        // containment of (R cap m_{c_i}^2)_n in both members
        std::vector<FatPoint> pts;
        for (int k = 0; k < n; ++k)
            pts.push_back(FatPoint{ctx.orbit(k), k == i ? 2 : 1});
        if (i >= n) pts.push_back(FatPoint{ctx.orbit(i), 2});
        Subspace rsq = vanishing_subspace(pts, n, f, ctx.t());
        if (!I1[n].contains_space(rsq) || !I2[n].contains_space(rsq))
            rep.containment_pass = false;
    }
    rep.pass = rep.agree_through >= i && rep.first_difference == i + 1 &&
               rep.hilbert_certified && rep.containment_pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Opposite ring (switch sides)
// ---------------------------------------------------------------------------

struct OppositeReport {
    bool anti_multiplicative = true;
    bool images_match = true;
    bool identity_fixed = true;
    int pairs_checked = 0;
    bool pass() const { return anti_multiplicative && images_match && identity_fixed; }
};

/// The map f in U_m -> phi^{-m}(f) is an anti-isomorphism S -> S(phi^{-1})
/// carrying R(phi,c) onto R(phi^{-1}, phi(c)).
inline OppositeReport opposite_ring_check(const SubringCtx& ctx, int max_degree,
                                          int sample_pairs = 5, unsigned seed = 20260810) {
    OppositeReport rep;
    const FieldPtr& f = ctx.field();
    const int t = ctx.t();
    const ProjAut& phi = ctx.S().phi();
    TwistRing Sop(f, ProjAut(f, phi.inverse_matrix()));
    auto antimap = [&](const GradedPoly& g) { return apply_aut(phi, g, -g.degree()); };

    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coef(-4, 4);
    auto random_linear = [&] {
        GradedPoly g = GradedPoly::zero(f, t, 1);
        while (g.is_zero()) {
            g = GradedPoly::zero(f, t, 1);
            for (int i = 0; i <= t; ++i) {
                Exps e(t + 1, 0);
                e[i] = 1;
                g.add_term(e, Scalar::from_int(f, coef(rng)));
            }
        }
        return g;
    };

    for (int k = 0; k < sample_pairs; ++k) {
        GradedPoly a = random_linear(), b = random_linear();
        GradedPoly lhs = antimap(ctx.S().mul(a, b));
        GradedPoly rhs = Sop.mul(antimap(b), antimap(a));
        if (lhs != rhs) rep.anti_multiplicative = false;
        ++rep.pairs_checked;
    }

    GradedPoly unit = GradedPoly::one(f, t);
    rep.identity_fixed = antimap(unit) == unit;

    for (int n = 0; n <= max_degree; ++n) {
        // image of R(phi,c)_n under the anti-map
        std::vector<SparseRow> rows;
        for (const auto& b : ctx.r_piece_closed(n).basis_polys())
            rows.push_back(apply_aut(phi, b, -n).to_row());
        const int ncols = static_cast<int>(monomial_basis(t, n).size());
        Subspace image(f, t, n, rref(std::move(rows), ncols));
        // R(phi^{-1}, phi(c))_n in closed form: orbit of phi(c) under phi^{-1}
        // is c_{-1}, c_{-2}, ...
        std::vector<ProjPoint> pts;
        for (int i = 0; i < n; ++i) pts.push_back(ctx.orbit(-i - 1));
        Subspace target = vanishing_subspace(pts, n, f, t);
        if (!(image == target)) rep.images_match = false;
    }
    return rep;
}

} // namespace twistlab

#endif
