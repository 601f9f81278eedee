#ifndef TWISTLAB_PROJGEO_HPP
#define TWISTLAB_PROJGEO_HPP

/// The graded polynomial ring U = k[x_0..x_t], points and automorphisms of
/// P^t, and degreewise subspaces of the graded pieces U_n.

#include <twistlab/linalg.hpp>

#include <mutex>
#include <sstream>

namespace twistlab {

// ---------------------------------------------------------------------------
// Monomials of U, ordered lexicographically with x0 < x1 < ... < xt
// ---------------------------------------------------------------------------

/// Same-degree monomial order: at the first differing variable, the larger
/// exponent makes the smaller monomial, so x0^d is the smallest monomial of
/// degree d and xt^d the largest.
struct XLexLess {
    bool operator()(const Exps& a, const Exps& b) const {
        const size_t n = std::min(a.size(), b.size());
        for (size_t i = 0; i < n; ++i)
            if (a[i] != b[i]) return a[i] > b[i];
        return a.size() > b.size();
    }
};

inline void monomials_rec_(int vars_left, int deg, Exps& cur, std::vector<Exps>& out) {
    if (vars_left == 1) {
        cur.push_back(deg);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int e = deg; e >= 0; --e) {
        cur.push_back(e);
        monomials_rec_(vars_left - 1, deg - e, cur, out);
        cur.pop_back();
    }
}

/// All exponent vectors of length t+1 summing to d, strictly increasing in
/// the XLexLess order; there are C(t+d, d) of them.
inline const std::vector<Exps>& monomial_basis(int t, int d) {
    static std::map<std::pair<int, int>, std::vector<Exps>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(t, d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<Exps> out;
    Exps cur;
    monomials_rec_(t + 1, d, cur, out);
    return cache.emplace(key, std::move(out)).first->second;
}

inline long binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline int monomial_index(int t, int d, const Exps& e) {
    const auto& basis = monomial_basis(t, d);
    auto it = std::lower_bound(basis.begin(), basis.end(), e, XLexLess{});
    if (it == basis.end() || *it != e) throw std::invalid_argument("monomial not of degree d");
    return static_cast<int>(it - basis.begin());
}

// ---------------------------------------------------------------------------
// GradedPoly
// ---------------------------------------------------------------------------

/// Sparse homogeneous polynomial in x_0..x_t with Scalar coefficients,
/// tagged with its degree (degree-0 polynomials represent constants).
class GradedPoly {
public:
    using TermMap = std::map<Exps, Scalar, XLexLess>;

    GradedPoly(FieldPtr field, int t, int degree)
        : field_(std::move(field)), t_(t), degree_(degree) {
        if (degree < 0) throw std::invalid_argument("negative degree");
    }

    static GradedPoly zero(const FieldPtr& f, int t, int degree) {
        return GradedPoly(f, t, degree);
    }

    static GradedPoly constant(const FieldPtr& f, int t, const Scalar& c) {
        GradedPoly g(f, t, 0);
        g.add_term(Exps(t + 1, 0), c);
        return g;
    }

    static GradedPoly one(const FieldPtr& f, int t) {
        return constant(f, t, Scalar::one(f));
    }

    static GradedPoly variable(const FieldPtr& f, int t, int i) {
        GradedPoly g(f, t, 1);
        Exps e(t + 1, 0);
        e.at(i) = 1;
        g.add_term(e, Scalar::one(f));
        return g;
    }

    static GradedPoly monomial(const FieldPtr& f, int t, const Exps& e, const Scalar& c) {
        int d = 0;
        for (int x : e) d += x;
        GradedPoly g(f, t, d);
        g.add_term(e, c);
        return g;
    }

    const FieldPtr& field() const { return field_; }
    int t() const { return t_; }
    int degree() const { return degree_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exps& e, const Scalar& c) {
        if (c.is_zero()) return;
        int d = 0;
        for (int x : e) d += x;
        if (static_cast<int>(e.size()) != t_ + 1 || d != degree_)
            throw DegreeMismatch("term does not match the tagged degree");
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    GradedPoly operator-() const {
        GradedPoly r(field_, t_, degree_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    friend GradedPoly operator+(const GradedPoly& a, const GradedPoly& b) {
        if (a.degree_ != b.degree_) throw DegreeMismatch("adding different degrees");
        GradedPoly r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }

    friend GradedPoly operator-(const GradedPoly& a, const GradedPoly& b) {
        if (a.degree_ != b.degree_) throw DegreeMismatch("subtracting different degrees");
        GradedPoly r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
        return r;
    }

    friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
        GradedPoly r(a.field_, a.t_, a.degree_ + b.degree_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exps e(a.t_ + 1);
                for (int i = 0; i <= a.t_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    friend GradedPoly operator*(const Scalar& c, const GradedPoly& a) {
        GradedPoly r(a.field_, a.t_, a.degree_);
        for (const auto& [e, v] : a.terms_) r.add_term(e, c * v);
        return r;
    }

    friend bool operator==(const GradedPoly& a, const GradedPoly& b) {
        return a.degree_ == b.degree_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const GradedPoly& a, const GradedPoly& b) { return !(a == b); }

    Scalar eval(const std::vector<Scalar>& coords) const {
        Scalar acc = Scalar::zero(field_);
        for (const auto& [e, c] : terms_) {
            Scalar term = c;
            for (int i = 0; i <= t_; ++i)
                if (e[i] != 0) term *= coords[i].pow(e[i]);
            acc += term;
        }
        return acc;
    }

    /// Substitute x_i -> sum_j m[i][j] x_j.
    GradedPoly substitute(const std::vector<std::vector<Scalar>>& m) const {
        bool diag = true;
        for (int i = 0; i <= t_ && diag; ++i)
            for (int j = 0; j <= t_ && diag; ++j)
                if (i != j && !m[i][j].is_zero()) diag = false;
        GradedPoly r(field_, t_, degree_);
        if (diag) {
            for (const auto& [e, c] : terms_) {
                Scalar f = c;
                for (int i = 0; i <= t_; ++i)
                    if (e[i] != 0) f *= m[i][i].pow(e[i]);
                r.add_term(e, f);
            }
            return r;
        }
        for (const auto& [e, c] : terms_) {
            GradedPoly term = constant(field_, t_, c);
            for (int i = 0; i <= t_; ++i) {
                if (e[i] == 0) continue;
                GradedPoly lin(field_, t_, 1);
                for (int j = 0; j <= t_; ++j) {
                    Exps ee(t_ + 1, 0);
                    ee[j] = 1;
                    lin.add_term(ee, m[i][j]);
                }
                for (int k = 0; k < e[i]; ++k) term = term * lin;
            }
            r = r + term;
        }
        return r;
    }

    SparseRow to_row() const {
        SparseRow row;
        for (const auto& [e, c] : terms_)
            row.ents.emplace_back(monomial_index(t_, degree_, e), c);
        return row;
    }

    static GradedPoly from_row(const FieldPtr& f, int t, int degree, const SparseRow& row) {
        GradedPoly g(f, t, degree);
        const auto& basis = monomial_basis(t, degree);
        for (const auto& [col, c] : row.ents) g.add_term(basis[col], c);
        return g;
    }

    std::string to_string() const;
    static GradedPoly parse(const FieldPtr& f, int t, const std::string& text);

private:
    FieldPtr field_;
    int t_, degree_;
    TermMap terms_;
};

inline std::string GradedPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) out += " + ";
        first = false;
        std::string mono;
        for (int i = 0; i <= t_; ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += "x" + std::to_string(i);
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        std::string cs = c.to_string();
        bool needs_paren = cs.find_first_of("+-/ ") != std::string::npos && cs.size() > 1;
        if (mono.empty()) {
            out += needs_paren ? "(" + cs + ")" : cs;
        } else if (c.is_one()) {
            out += mono;
        } else {
            out += (needs_paren ? "(" + cs + ")" : cs) + "*" + mono;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// ProjPoint
// ---------------------------------------------------------------------------

/// A closed point of P^t: t+1 homogeneous coordinates, normalized so the
/// first nonzero coordinate is 1.
class ProjPoint {
public:
    ProjPoint(FieldPtr field, std::vector<Scalar> coords)
        : field_(std::move(field)), coords_(std::move(coords)) {
        normalize_();
    }

    const FieldPtr& field() const { return field_; }
    int t() const { return static_cast<int>(coords_.size()) - 1; }
    const std::vector<Scalar>& coords() const { return coords_; }
    const Scalar& operator[](int i) const { return coords_[i]; }

    friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
        return a.coords_ == b.coords_;
    }
    friend bool operator!=(const ProjPoint& a, const ProjPoint& b) { return !(a == b); }

    std::string to_string() const {
        std::string out = "(";
        for (size_t i = 0; i < coords_.size(); ++i) {
            if (i) out += ":";
            out += coords_[i].to_string();
        }
        return out + ")";
    }

    static ProjPoint parse(const FieldPtr& f, const std::string& text) {
        std::string s = text;
        auto strip = [](std::string v) {
            while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.erase(v.begin());
            while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.pop_back();
            return v;
        };
        s = strip(s);
        if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
            s = s.substr(1, s.size() - 2);
        std::vector<Scalar> coords;
        size_t start = 0;
        int depth = 0;
        for (size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || (s[i] == ':' && depth == 0)) {
                coords.push_back(Scalar::parse(f, s.substr(start, i - start)));
                start = i + 1;
            } else if (s[i] == '(') {
                ++depth;
            } else if (s[i] == ')') {
                --depth;
            }
        }
        return ProjPoint(f, std::move(coords));
    }

private:
    void normalize_() {
        for (auto& c : coords_) {
            if (!c.is_zero()) {
                Scalar inv = c.inverse();
                for (auto& d : coords_) d *= inv;
                return;
            }
        }
        throw std::invalid_argument("projective point needs a nonzero coordinate");
    }

    FieldPtr field_;
    std::vector<Scalar> coords_;
};

// ---------------------------------------------------------------------------
// ProjAut
// ---------------------------------------------------------------------------

using ScalarMatrix = std::vector<std::vector<Scalar>>;

/// Automorphism of P^t given by an invertible (t+1)x(t+1) matrix acting on
/// homogeneous coordinate columns, normalized within its scalar class so the
/// first nonzero entry of the first nonzero row is 1.  The corresponding
/// algebra automorphism of U acts by substitution x |-> Mx, so that
/// f(d) = 0 iff [phi(f)](M^{-1} d) = 0.
class ProjAut {
public:
    ProjAut(FieldPtr field, ScalarMatrix m) : field_(std::move(field)), mat_(std::move(m)) {
        normalize_();
        if (scalar_det(mat_, field_).is_zero())
            throw std::invalid_argument("automorphism matrix must be invertible");
        inv_ = scalar_inverse(mat_, field_);
    }

    // copies share nothing; the power cache is rebuilt lazily
    ProjAut(const ProjAut& o) : field_(o.field_), mat_(o.mat_), inv_(o.inv_) {}
    ProjAut(ProjAut&& o) noexcept
        : field_(std::move(o.field_)), mat_(std::move(o.mat_)), inv_(std::move(o.inv_)) {}
    ProjAut& operator=(const ProjAut& o) {
        if (this != &o) {
            field_ = o.field_;
            mat_ = o.mat_;
            inv_ = o.inv_;
            std::lock_guard<std::mutex> lock(mtx_);
            powers_.clear();
        }
        return *this;
    }

    static ProjAut identity(const FieldPtr& f, int t) {
        ScalarMatrix m;
        for (int i = 0; i <= t; ++i) {
            std::vector<Scalar> row;
            for (int j = 0; j <= t; ++j)
                row.push_back(i == j ? Scalar::one(f) : Scalar::zero(f));
            m.push_back(std::move(row));
        }
        return ProjAut(f, std::move(m));
    }

    static ProjAut diagonal(const FieldPtr& f, const std::vector<Scalar>& d) {
        ScalarMatrix m;
        const int n = static_cast<int>(d.size());
        for (int i = 0; i < n; ++i) {
            std::vector<Scalar> row;
            for (int j = 0; j < n; ++j) row.push_back(i == j ? d[i] : Scalar::zero(f));
            m.push_back(std::move(row));
        }
        return ProjAut(f, std::move(m));
    }

    const FieldPtr& field() const { return field_; }
    int t() const { return static_cast<int>(mat_.size()) - 1; }
    const ScalarMatrix& matrix() const { return mat_; }
    const ScalarMatrix& inverse_matrix() const { return inv_; }

    bool is_diagonal() const {
        for (size_t i = 0; i < mat_.size(); ++i)
            for (size_t j = 0; j < mat_.size(); ++j)
                if (i != j && !mat_[i][j].is_zero()) return false;
        return true;
    }

    const ScalarMatrix& power(long k) const {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = powers_.find(k);
        if (it != powers_.end()) return it->second;
        ScalarMatrix v = power_nolock_(k);
        return powers_.emplace(k, std::move(v)).first->second;
    }

    /// phi^power(d) as a point map: coordinates M^power * d.
    ProjPoint apply_point(const ProjPoint& d, long k = 1) const {
        const ScalarMatrix& m = power(k);
        const int n = t() + 1;
        std::vector<Scalar> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) {
            Scalar s = Scalar::zero(field_);
            for (int j = 0; j < n; ++j)
                if (!m[i][j].is_zero() && !d[j].is_zero()) s += m[i][j] * d[j];
            out.push_back(std::move(s));
        }
        return ProjPoint(field_, std::move(out));
    }

    friend bool operator==(const ProjAut& a, const ProjAut& b) { return a.mat_ == b.mat_; }

private:
    ScalarMatrix power_nolock_(long k) const {
        if (k == 0) {
            ScalarMatrix id;
            const int n = t() + 1;
            for (int i = 0; i < n; ++i) {
                std::vector<Scalar> row;
                for (int j = 0; j < n; ++j)
                    row.push_back(i == j ? Scalar::one(field_) : Scalar::zero(field_));
                id.push_back(std::move(row));
            }
            return id;
        }
        const ScalarMatrix& base = k > 0 ? mat_ : inv_;
        ScalarMatrix acc = base;
        for (long i = 1; i < std::abs(k); ++i) acc = mat_mul_(acc, base);
        return acc;
    }

    ScalarMatrix mat_mul_(const ScalarMatrix& a, const ScalarMatrix& b) const {
        const int n = t() + 1;
        ScalarMatrix out;
        for (int i = 0; i < n; ++i) {
            std::vector<Scalar> row;
            for (int j = 0; j < n; ++j) {
                Scalar s = Scalar::zero(field_);
                for (int l = 0; l < n; ++l)
                    if (!a[i][l].is_zero() && !b[l][j].is_zero()) s += a[i][l] * b[l][j];
                row.push_back(std::move(s));
            }
            out.push_back(std::move(row));
        }
        return out;
    }

    void normalize_() {
        for (auto& row : mat_) {
            for (auto& e : row) {
                if (!e.is_zero()) {
                    Scalar inv = e.inverse();
                    for (auto& r2 : mat_)
                        for (auto& e2 : r2) e2 *= inv;
                    return;
                }
            }
        }
        throw std::invalid_argument("zero matrix");
    }

    FieldPtr field_;
    ScalarMatrix mat_, inv_;
    mutable std::map<long, ScalarMatrix> powers_;
    mutable std::mutex mtx_;
};

/// The induced algebra automorphism phi^power applied to a homogeneous
/// polynomial: substitution by the matrix of phi^power.
inline GradedPoly apply_aut(const ProjAut& phi, const GradedPoly& f, long power = 1) {
    if (power == 0) return f;
    return f.substitute(phi.power(power));
}

/// The orbit point c_i = phi^{-i}(c).
inline ProjPoint orbit_point(const ProjAut& phi, const ProjPoint& c, long i) {
    return phi.apply_point(c, -i);
}

// ---------------------------------------------------------------------------
// Subspace
// ---------------------------------------------------------------------------

/// A subspace of U_d stored as a canonical RREF basis matrix, columns indexed
/// by the degree-d monomial basis.  Equality of subspaces is equality of the
/// stored matrices.
class Subspace {
public:
    Subspace(FieldPtr field, int t, int degree, Rref basis)
        : field_(std::move(field)), t_(t), degree_(degree), basis_(std::move(basis)) {}

    static Subspace zero_space(const FieldPtr& f, int t, int degree) {
        return Subspace(f, t, degree, Rref{});
    }

    static Subspace full(const FieldPtr& f, int t, int degree) {
        const int n = static_cast<int>(monomial_basis(t, degree).size());
        Rref b;
        for (int i = 0; i < n; ++i) {
            SparseRow r;
            r.push(i, Scalar::one(f));
            b.rows.push_back(std::move(r));
            b.pivots.push_back(i);
        }
        return Subspace(f, t, degree, std::move(b));
    }

    static Subspace span(const FieldPtr& f, int t, int degree,
                         const std::vector<GradedPoly>& polys) {
        std::vector<SparseRow> rows;
        for (const auto& p : polys) {
            if (p.degree() != degree) throw DegreeMismatch("span: degree mismatch");
            rows.push_back(p.to_row());
        }
        const int n = static_cast<int>(monomial_basis(t, degree).size());
        return Subspace(f, t, degree, rref(std::move(rows), n));
    }

    const FieldPtr& field() const { return field_; }
    int t() const { return t_; }
    int degree() const { return degree_; }
    int dim() const { return basis_.rank(); }
    int ambient_dim() const { return static_cast<int>(monomial_basis(t_, degree_).size()); }
    const Rref& basis() const { return basis_; }

    std::vector<GradedPoly> basis_polys() const {
        std::vector<GradedPoly> out;
        out.reserve(basis_.rows.size());
        for (const auto& r : basis_.rows)
            out.push_back(GradedPoly::from_row(field_, t_, degree_, r));
        return out;
    }

    bool contains(const GradedPoly& f) const {
        if (f.degree() != degree_) throw DegreeMismatch("contains: degree mismatch");
        return in_row_space(basis_, f.to_row());
    }

    bool contains_space(const Subspace& o) const {
        check_compatible_(o);
        return space_contains(basis_, o.basis_);
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.degree_ == b.degree_ && a.basis_.rows == b.basis_.rows;
    }
    friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }

    Subspace intersect(const Subspace& o) const {
        check_compatible_(o);
        return Subspace(field_, t_, degree_,
                        intersect_spaces(basis_, o.basis_, ambient_dim(), field_));
    }

    Subspace sum(const Subspace& o) const {
        check_compatible_(o);
        return Subspace(field_, t_, degree_, sum_spaces(basis_, o.basis_, ambient_dim()));
    }

    /// Span of pairwise products; lands in degree a.degree + b.degree.
    Subspace product(const Subspace& o) const {
        if (t_ != o.t_) throw DegreeMismatch("product: different ambient rings");
        std::vector<GradedPoly> mine = basis_polys(), theirs = o.basis_polys();
        std::vector<SparseRow> rows;
        rows.reserve(mine.size() * theirs.size());
        for (const auto& a : mine)
            for (const auto& b : theirs) rows.push_back((a * b).to_row());
        const int deg = degree_ + o.degree_;
        const int n = static_cast<int>(monomial_basis(t_, deg).size());
        return Subspace(field_, t_, deg, rref(std::move(rows), n));
    }

private:
    void check_compatible_(const Subspace& o) const {
        if (t_ != o.t_ || degree_ != o.degree_)
            throw DegreeMismatch("subspace operation requires equal degrees");
    }

    FieldPtr field_;
    int t_, degree_;
    Rref basis_;
};

// ---------------------------------------------------------------------------
// Vanishing subspaces (reduced and fat points)
// ---------------------------------------------------------------------------

struct FatPoint {
    ProjPoint point;
    int multiplicity = 1;
};

/// Evaluation row of the degree-d monomials at a point.
inline SparseRow evaluation_row(const ProjPoint& p, int d) {
    SparseRow row;
    const auto& basis = monomial_basis(p.t(), d);
    for (size_t m = 0; m < basis.size(); ++m) {
        Scalar v = Scalar::one(p.field());
        for (int i = 0; i <= p.t(); ++i)
            if (basis[m][i] != 0) v *= p[i].pow(basis[m][i]);
        row.push(static_cast<int>(m), std::move(v));
    }
    return row;
}

namespace detail {

/// Row of the linear condition "partial derivative d^alpha f vanishes at p"
/// over the degree-d monomial columns (characteristic 0 only).
inline SparseRow derivative_row(const ProjPoint& p, int d, const Exps& alpha) {
    SparseRow row;
    const auto& basis = monomial_basis(p.t(), d);
    const FieldPtr& f = p.field();
    for (size_t m = 0; m < basis.size(); ++m) {
        const Exps& e = basis[m];
        BigInt factor = 1;
        bool ok = true;
        for (int i = 0; i <= p.t() && ok; ++i) {
            if (e[i] < alpha[i]) { ok = false; break; }
            for (int k = 0; k < alpha[i]; ++k) factor *= (e[i] - k);
        }
        if (!ok) continue;
        Scalar v = Scalar::from_int(f, factor);
        for (int i = 0; i <= p.t(); ++i) {
            int rem = e[i] - alpha[i];
            if (rem != 0) v *= p[i].pow(rem);
        }
        row.push(static_cast<int>(m), std::move(v));
    }
    return row;
}

/// (m_p^e)_d computed multiplicatively: the e-fold product of (m_p)_1 times
/// U_{d-e}.  Characteristic-free.
inline Subspace power_vanishing_space(const ProjPoint& p, int e, int d) {
    const FieldPtr& f = p.field();
    const int t = p.t();
    if (d < e) return Subspace::zero_space(f, t, d);
    std::vector<SparseRow> cond{evaluation_row(p, 1)};
    Rref ker = kernel_of_rows(std::move(cond), t + 1, f);
    Subspace lin(f, t, 1, std::move(ker));
    Subspace acc = lin;
    for (int k = 1; k < e; ++k) acc = acc.product(lin);
    if (d > e) acc = acc.product(Subspace::full(f, t, d - e));
    return acc;
}

} // namespace detail

/// {f in U_d : f vanishes to order e_i at each point}.  In characteristic 0
/// order-e vanishing is the vanishing of all partials of order < e; in
/// characteristic p it is membership in the multiplicative power (m^e)_d.
inline Subspace vanishing_subspace(const std::vector<FatPoint>& points, int d,
                                   const FieldPtr& field, int t) {
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j)
            if (points[i].point == points[j].point) throw DuplicatePoint();

    const int ncols = static_cast<int>(monomial_basis(t, d).size());
    std::vector<SparseRow> cond;
    std::vector<Subspace> extra;
    for (const auto& fp : points) {
        if (fp.multiplicity < 1) throw std::invalid_argument("multiplicity must be >= 1");
        if (fp.multiplicity == 1) {
            cond.push_back(evaluation_row(fp.point, d));
        } else if (field->characteristic() == 0) {
            for (int deg = 0; deg < fp.multiplicity; ++deg)
                for (const auto& a : monomial_basis(t, deg))
                    cond.push_back(detail::derivative_row(fp.point, d, a));
        } else {
            extra.push_back(detail::power_vanishing_space(fp.point, fp.multiplicity, d));
        }
    }
    Subspace result(field, t, d, kernel_of_rows(std::move(cond), ncols, field));
    for (const auto& s : extra) result = result.intersect(s);
    return result;
}

inline Subspace vanishing_subspace(const std::vector<ProjPoint>& points, int d,
                                   const FieldPtr& field, int t) {
    std::vector<FatPoint> fps;
    fps.reserve(points.size());
    for (const auto& p : points) fps.push_back(FatPoint{p, 1});
    return vanishing_subspace(fps, d, field, t);
}

// ---------------------------------------------------------------------------
// Homogeneous polynomial parser
// ---------------------------------------------------------------------------

inline GradedPoly GradedPoly::parse(const FieldPtr& f, int t, const std::string& text) {
    detail::Lexer lex(text);

    struct Val {
        // either a scalar or a homogeneous polynomial
        std::optional<Scalar> s;
        std::optional<GradedPoly> p;

        GradedPoly as_poly(const FieldPtr& f, int t) const {
            if (p) return *p;
            return GradedPoly::constant(f, t, *s);
        }
    };

    struct Parser {
        detail::Lexer& lx;
        const FieldPtr& f;
        int t;

        Val expr() {
            Val v = term();
            while (lx.kind == detail::Lexer::Op && (lx.text == "+" || lx.text == "-")) {
                bool plus = lx.text == "+";
                lx.advance();
                Val w = term();
                v = add(v, w, plus);
            }
            return v;
        }

        Val add(const Val& a, const Val& b, bool plus) {
            if (a.s && b.s) return Val{plus ? *a.s + *b.s : *a.s - *b.s, std::nullopt};
            GradedPoly pa = a.as_poly(f, t), pb = b.as_poly(f, t);
            if (pa.is_zero() && pa.degree() != pb.degree())
                pa = GradedPoly::zero(f, t, pb.degree());
            if (pb.is_zero() && pa.degree() != pb.degree())
                pb = GradedPoly::zero(f, t, pa.degree());
            return Val{std::nullopt, plus ? pa + pb : pa - pb};
        }

        Val term() {
            Val v = factor();
            while (lx.kind == detail::Lexer::Op && (lx.text == "*" || lx.text == "/")) {
                bool mul = lx.text == "*";
                lx.advance();
                Val w = factor();
                if (mul) {
                    if (v.s && w.s) {
                        v = Val{*v.s * *w.s, std::nullopt};
                    } else if (v.s) {
                        v = Val{std::nullopt, *v.s * w.as_poly(f, t)};
                    } else if (w.s) {
                        v = Val{std::nullopt, *w.s * *v.p};
                    } else {
                        v = Val{std::nullopt, *v.p * *w.p};
                    }
                } else {
                    if (!w.s) throw ParseError("cannot divide by a polynomial in x");
                    if (v.s)
                        v = Val{*v.s / *w.s, std::nullopt};
                    else
                        v = Val{std::nullopt, w.s->inverse() * *v.p};
                }
            }
            return v;
        }

        Val factor() {
            if (lx.kind == detail::Lexer::Op && lx.text == "-") {
                lx.advance();
                Val v = factor();
                if (v.s) return Val{-*v.s, std::nullopt};
                return Val{std::nullopt, -*v.p};
            }
            Val v = atom();
            if (lx.kind == detail::Lexer::Op && lx.text == "^") {
                lx.advance();
                bool neg = false;
                if (lx.kind == detail::Lexer::Op && lx.text == "-") {
                    neg = true;
                    lx.advance();
                }
                if (lx.kind != detail::Lexer::Num) throw ParseError("expected exponent");
                long e = std::stol(lx.text);
                lx.advance();
                if (v.s) return Val{v.s->pow(neg ? -e : e), std::nullopt};
                if (neg) throw ParseError("negative power of a polynomial");
                GradedPoly r = GradedPoly::one(f, t);
                for (long k = 0; k < e; ++k) r = r * *v.p;
                return Val{std::nullopt, r};
            }
            return v;
        }

        Val atom() {
            if (lx.kind == detail::Lexer::Num) {
                BigInt n(lx.text);
                lx.advance();
                return Val{Scalar::from_int(f, n), std::nullopt};
            }
            if (lx.kind == detail::Lexer::Ident) {
                std::string name = lx.text;
                lx.advance();
                if (name.size() >= 2 && name[0] == 'x') {
                    bool digits = true;
                    for (size_t i = 1; i < name.size(); ++i)
                        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
                    if (digits) {
                        int idx = std::stoi(name.substr(1));
                        if (idx < 0 || idx > t) throw ParseError("variable out of range: " + name);
                        return Val{std::nullopt, GradedPoly::variable(f, t, idx)};
                    }
                }
                return Val{Scalar::param(f, name), std::nullopt};
            }
            if (lx.kind == detail::Lexer::Op && lx.text == "(") {
                lx.advance();
                Val v = expr();
                if (!(lx.kind == detail::Lexer::Op && lx.text == ")"))
                    throw ParseError("expected ')'");
                lx.advance();
                return v;
            }
            throw ParseError("unexpected token '" + lx.text + "'");
        }
    };

    Parser p{lex, f, t};
    Val v = p.expr();
    if (lex.kind != detail::Lexer::End) throw ParseError("trailing input");
    return v.as_poly(f, t);
}

} // namespace twistlab

#endif
