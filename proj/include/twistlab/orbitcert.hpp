#ifndef TWISTLAB_ORBITCERT_HPP
#define TWISTLAB_ORBITCERT_HPP

/// Geometry certificates on orbits: distinctness, general position through
/// evaluation-matrix ranks, explicit hypersurface witnesses when general
/// position fails, and the symbolic determinant of monomial power matrices.
/// Every verdict is window-bounded evidence, never a density proof.

#include <twistlab/projgeo.hpp>

namespace twistlab {

/// A finite slice of the orbit {phi^i(c)}: the stored indices i refer to
/// c_i = phi^{-i}(c).  Contiguous ranges are the common case; explicit index
/// lists support probing sub-orbits such as the power-of-p indices.
class OrbitWindow {
public:
    OrbitWindow(ProjAut phi, ProjPoint c, long lo, long hi)
        : phi_(std::move(phi)), c_(std::move(c)) {
        if (lo > hi) throw std::invalid_argument("empty orbit window");
        for (long i = lo; i <= hi; ++i) indices_.push_back(i);
        cache_();
    }

    OrbitWindow(ProjAut phi, ProjPoint c, std::vector<long> indices)
        : phi_(std::move(phi)), c_(std::move(c)), indices_(std::move(indices)) {
        if (indices_.empty()) throw std::invalid_argument("empty orbit window");
        std::sort(indices_.begin(), indices_.end());
        indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
        cache_();
    }

    const ProjAut& phi() const { return phi_; }
    const ProjPoint& base_point() const { return c_; }
    const std::vector<long>& indices() const { return indices_; }
    const std::vector<ProjPoint>& points() const { return points_; }
    int t() const { return phi_.t(); }
    const FieldPtr& field() const { return phi_.field(); }
    size_t size() const { return points_.size(); }

    OrbitWindow sub(std::vector<long> idx) const {
        return OrbitWindow(phi_, c_, std::move(idx));
    }

    /// The sub-window of nonnegative indices ({c_i}_{i>=0}).
    OrbitWindow nonnegative_side() const { return side_(true); }
    /// The sub-window of indices <= -1.
    OrbitWindow negative_side() const { return side_(false); }

private:
    OrbitWindow side_(bool nonneg) const {
        std::vector<long> idx;
        for (long i : indices_)
            if ((i >= 0) == nonneg) idx.push_back(i);
        if (idx.empty()) throw std::invalid_argument("requested side of the window is empty");
        return OrbitWindow(phi_, c_, std::move(idx));
    }

    void cache_() {
        points_.reserve(indices_.size());
        for (long i : indices_) points_.push_back(orbit_point(phi_, c_, i));
    }

    ProjAut phi_;
    ProjPoint c_;
    std::vector<long> indices_;
    std::vector<ProjPoint> points_;
};

/// True iff all cached orbit points are pairwise distinct.
inline bool distinctness_check(const OrbitWindow& w) {
    const auto& pts = w.points();
    for (size_t a = 0; a < pts.size(); ++a)
        for (size_t b = a + 1; b < pts.size(); ++b)
            if (pts[a] == pts[b]) return false;
    return true;
}

struct PositionCertificate {
    int degree = 0;
    enum Verdict { GeneralPosition, HypersurfaceFound } verdict = GeneralPosition;
    std::optional<GradedPoly> witness;
    size_t npoints = 0;
    long ncolumns = 0;
    bool undersized = false; // fewer points than columns: vacuous verdict
};

/// Rank of the evaluation matrix (monomials of degree d at the window
/// points).  Full column rank certifies general position at degree d;
/// otherwise a kernel vector is an explicit hypersurface through every
/// window point.
inline PositionCertificate position_certificate(const OrbitWindow& w, int d) {
    PositionCertificate cert;
    cert.degree = d;
    const FieldPtr& f = w.field();
    const int t = w.t();
    const long ncols = static_cast<long>(monomial_basis(t, d).size());
    cert.npoints = w.size();
    cert.ncolumns = ncols;
    cert.undersized = static_cast<long>(w.size()) < ncols;

    std::vector<SparseRow> rows;
    rows.reserve(w.size());
    for (const auto& p : w.points()) rows.push_back(evaluation_row(p, d));
    Rref ker = kernel_of_rows(std::move(rows), static_cast<int>(ncols), f);
    if (ker.rank() == 0) {
        cert.verdict = PositionCertificate::GeneralPosition;
    } else {
        cert.verdict = PositionCertificate::HypersurfaceFound;
        cert.witness = GradedPoly::from_row(f, t, d, ker.rows.front());
    }
    return cert;
}

/// Re-verifies a hypersurface witness independently of how it was found.
inline bool witness_vanishes_on(const OrbitWindow& w, const GradedPoly& witness) {
    for (const auto& p : w.points())
        if (!witness.eval(p.coords()).is_zero()) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Symbolic determinant of monomial power matrices
// ---------------------------------------------------------------------------

struct DeterminantReport {
    bool nonzero = false;
    Exps leading_exponents;    // of the determinant, in x_0..x_t
    BigInt leading_coeff = 0;
    Exps predicted_exponents;  // f_1^{a_1} f_2^{a_2} ... f_N^{a_N}
    bool leading_matches = false;
    long terms = 0;
};

/// det(f_i^{a_j}) for the lex-ordered degree-d monomials f_1 < ... < f_N and
/// a strictly increasing exponent sequence a.  The determinant is expanded
/// exactly; its lex-leading term is compared with the diagonal product.
inline DeterminantReport symbolic_determinant(int t, int d, const std::vector<long>& a,
                                              long size_limit = 20) {
    const auto& monos = monomial_basis(t, d);
    const long N = static_cast<long>(monos.size());
    if (static_cast<long>(a.size()) != N)
        throw std::invalid_argument("need exactly C(t+d,d) exponents");
    for (size_t j = 0; j + 1 < a.size(); ++j)
        if (a[j] >= a[j + 1])
            throw std::invalid_argument("exponent sequence must be strictly increasing");
    if (a.front() < 0) throw std::invalid_argument("exponents must be nonnegative");
    if (N > size_limit) throw SizeLimit("determinant size over the configured limit");

    // treat x_0..x_t as parameters of a scratch polynomial ring
    const int nv = t + 1;
    std::vector<std::vector<ParamPoly>> m(N, std::vector<ParamPoly>(N, ParamPoly::zero(0, nv)));
    for (long i = 0; i < N; ++i) {
        for (long j = 0; j < N; ++j) {
            Exps e(nv, 0);
            for (int v = 0; v < nv; ++v) e[v] = static_cast<int>(monos[i][v] * a[j]);
            ParamPoly mono(0, nv);
            mono.add_term(e, BigInt(1));
            m[i][j] = std::move(mono);
        }
    }
    ParamPoly det = bareiss_det(std::move(m), 0, nv);

    DeterminantReport rep;
    rep.nonzero = !det.is_zero();
    rep.terms = static_cast<long>(det.terms().size());
    rep.predicted_exponents.assign(nv, 0);
    for (long i = 0; i < N; ++i)
        for (int v = 0; v < nv; ++v)
            rep.predicted_exponents[v] += static_cast<int>(monos[i][v] * a[i]);
    if (rep.nonzero) {
        rep.leading_exponents = det.leading_exps();
        rep.leading_coeff = det.leading_coeff();
        rep.leading_matches =
            rep.leading_exponents == rep.predicted_exponents && rep.leading_coeff == 1;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Noetherian evidence report
// ---------------------------------------------------------------------------

struct SideEvidence {
    std::string side; // "nonneg", "negative", "full"
    std::vector<PositionCertificate> certificates;
    bool obstruction_found = false;
};

struct NoetherianReport {
    int dmax = 0;
    std::vector<long> window_indices;
    std::vector<SideEvidence> sides;
    /// Window-bounded evidence only; critical density itself quantifies over
    /// all closed subsets and is never claimed from finite data.
    bool window_bounded = true;
};

inline NoetherianReport noetherian_report(const OrbitWindow& w, int dmax) {
    NoetherianReport rep;
    rep.dmax = dmax;
    rep.window_indices = w.indices();
    auto run_side = [&](const char* name, const OrbitWindow& side) {
        SideEvidence ev;
        ev.side = name;
        for (int d = 1; d <= dmax; ++d) {
            PositionCertificate cert = position_certificate(side, d);
            if (cert.verdict == PositionCertificate::HypersurfaceFound)
                ev.obstruction_found = true;
            ev.certificates.push_back(std::move(cert));
        }
        rep.sides.push_back(std::move(ev));
    };
    bool has_nonneg = false, has_neg = false;
    for (long i : w.indices()) (i >= 0 ? has_nonneg : has_neg) = true;
    if (has_nonneg) run_side("nonneg", w.nonnegative_side());
    if (has_neg) run_side("negative", w.negative_side());
    run_side("full", w);
    return rep;
}

} // namespace twistlab

#endif
