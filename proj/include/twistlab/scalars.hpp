#ifndef TWISTLAB_SCALARS_HPP
#define TWISTLAB_SCALARS_HPP

/// Exact field tower: a prime field (Q or F_p), a polynomial ring in named
/// transcendental parameters over it, and the fraction field of that ring.
/// Every Scalar is kept in a canonical reduced form so that equality is
/// structural.

#include <twistlab/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace twistlab {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// FieldSpec
// ---------------------------------------------------------------------------

class FieldSpec;
using FieldPtr = std::shared_ptr<const FieldSpec>;

/// Describes the coefficient field: characteristic 0 or a prime p, together
/// with an ordered list of transcendental parameter names.
class FieldSpec {
public:
    FieldSpec(long characteristic, std::vector<std::string> params)
        : char_(characteristic), params_(std::move(params)) {
        if (char_ != 0 && !is_prime_(char_))
            throw std::invalid_argument("characteristic must be 0 or prime");
        std::set<std::string> seen;
        for (const auto& n : params_) {
            if (n.empty()) throw std::invalid_argument("empty parameter name");
            if (!seen.insert(n).second)
                throw std::invalid_argument("duplicate parameter name: " + n);
        }
    }

    long characteristic() const { return char_; }
    const std::vector<std::string>& params() const { return params_; }
    int nparams() const { return static_cast<int>(params_.size()); }

    int param_index(const std::string& name) const {
        for (int i = 0; i < nparams(); ++i)
            if (params_[i] == name) return i;
        return -1;
    }

    bool same_as(const FieldSpec& o) const {
        return char_ == o.char_ && params_ == o.params_;
    }

    /// A field with the same characteristic and extra parameters appended.
    std::vector<std::string> extended_params(const std::vector<std::string>& extra) const {
        std::vector<std::string> all = params_;
        all.insert(all.end(), extra.begin(), extra.end());
        return all;
    }

private:
    static bool is_prime_(long p) {
        if (p < 2) return false;
        for (long d = 2; d * d <= p; ++d)
            if (p % d == 0) return false;
        return true;
    }

    long char_;
    std::vector<std::string> params_;
};

inline FieldPtr make_field(long characteristic, std::vector<std::string> params = {}) {
    return std::make_shared<FieldSpec>(characteristic, std::move(params));
}

inline FieldPtr extend_field(const FieldPtr& base, const std::vector<std::string>& extra) {
    return make_field(base->characteristic(), base->extended_params(extra));
}

// ---------------------------------------------------------------------------
// ParamPoly: multivariate polynomial in the field parameters
// ---------------------------------------------------------------------------

using Exps = std::vector<int>;

/// Graded lex on parameter exponent vectors: higher total degree wins, ties
/// broken so that a smaller exponent on an earlier variable means a larger
/// monomial (variable 0 is the smallest).
struct GrlexGreater {
    bool operator()(const Exps& a, const Exps& b) const {
        long da = 0, db = 0;
        for (int e : a) da += e;
        for (int e : b) db += e;
        if (da != db) return da > db;
        const size_t n = std::min(a.size(), b.size());
        for (size_t i = 0; i < n; ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return a.size() < b.size();
    }
};

/// Sparse polynomial in the parameters of a FieldSpec, coefficients in Z
/// (reduced into [0,p) when the characteristic is p).  Terms are kept in a
/// vector sorted grlex-descending, so the leading term is first and all
/// arithmetic runs as linear merges.
class ParamPoly {
public:
    using Term = std::pair<Exps, BigInt>;
    using TermMap = std::vector<Term>;

    ParamPoly(long characteristic, int nvars)
        : p_(characteristic), nvars_(nvars) {}

    static ParamPoly zero(long p, int nvars) { return ParamPoly(p, nvars); }

    static ParamPoly constant(long p, int nvars, const BigInt& c) {
        ParamPoly f(p, nvars);
        f.add_term(Exps(nvars, 0), c);
        return f;
    }

    static ParamPoly variable(long p, int nvars, int idx, int power = 1) {
        ParamPoly f(p, nvars);
        Exps e(nvars, 0);
        e.at(idx) = power;
        f.add_term(e, BigInt(1));
        return f;
    }

    long characteristic() const { return p_; }
    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() > 1) return false;
        for (int e : terms_.front().first)
            if (e != 0) return false;
        return true;
    }

    bool is_monomial() const { return terms_.size() == 1; }

    bool is_one() const { return is_constant() && !terms_.empty() && terms_.front().second == 1; }

    BigInt constant_value() const {
        if (terms_.empty()) return BigInt(0);
        return terms_.front().second;
    }

    const Exps& leading_exps() const { return terms_.front().first; }
    const BigInt& leading_coeff() const { return terms_.front().second; }

    long total_degree() const {
        long best = -1;
        for (const auto& [e, c] : terms_) {
            long d = 0;
            for (int x : e) d += x;
            best = std::max(best, d);
        }
        return best;
    }

    int degree_in(int var) const {
        int best = -1;
        for (const auto& [e, c] : terms_) best = std::max(best, e[var]);
        return best;
    }

    bool depends_on(int var) const { return degree_in(var) > 0; }

    void add_term(const Exps& e, const BigInt& c) {
        BigInt cc = reduce_coeff_(c);
        if (cc == 0) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                                   [](const Term& t, const Exps& k) {
                                       return GrlexGreater{}(t.first, k);
                                   });
        if (it != terms_.end() && it->first == e) {
            it->second = reduce_coeff_(it->second + cc);
            if (it->second == 0) terms_.erase(it);
        } else {
            terms_.insert(it, Term{e, std::move(cc)});
        }
    }

    ParamPoly operator-() const {
        ParamPoly r(p_, nvars_);
        r.terms_.reserve(terms_.size());
        for (const auto& [e, c] : terms_) r.terms_.emplace_back(e, r.reduce_coeff_(-c));
        return r;
    }

    friend ParamPoly operator+(const ParamPoly& a, const ParamPoly& b) {
        return merge_(a, b, false);
    }

    friend ParamPoly operator-(const ParamPoly& a, const ParamPoly& b) {
        return merge_(a, b, true);
    }

    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
        ParamPoly r(a.p_, a.nvars_);
        if (a.is_zero() || b.is_zero()) return r;
        if (b.is_monomial()) return scaled_by_term_(a, b.terms_.front());
        if (a.is_monomial()) return scaled_by_term_(b, a.terms_.front());
        std::vector<Term> prods;
        prods.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exps e(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                prods.emplace_back(std::move(e), ca * cb);
            }
        }
        std::sort(prods.begin(), prods.end(), [](const Term& x, const Term& y) {
            return GrlexGreater{}(x.first, y.first);
        });
        for (auto& t : prods) {
            if (!r.terms_.empty() && r.terms_.back().first == t.first) {
                r.terms_.back().second += t.second;
            } else {
                r.terms_.push_back(std::move(t));
            }
        }
        // coalesce: drop zeros and reduce mod p
        size_t w = 0;
        for (size_t i = 0; i < r.terms_.size(); ++i) {
            BigInt cc = r.reduce_coeff_(r.terms_[i].second);
            if (cc != 0) {
                if (w != i) r.terms_[w].first = std::move(r.terms_[i].first);
                r.terms_[w].second = std::move(cc);
                ++w;
            }
        }
        r.terms_.resize(w);
        return r;
    }

    friend bool operator==(const ParamPoly& a, const ParamPoly& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const ParamPoly& a, const ParamPoly& b) { return !(a == b); }

    ParamPoly pow(long k) const {
        ParamPoly r = constant(p_, nvars_, 1);
        ParamPoly base = *this;
        while (k > 0) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    /// Exact division; returns nothing if the division is not exact.
    friend std::optional<ParamPoly> try_divide_exact(const ParamPoly& f, const ParamPoly& g) {
        if (g.is_zero()) return std::nullopt;
        ParamPoly q(f.p_, f.nvars_);
        ParamPoly rem = f;
        const Exps& ge = g.leading_exps();
        const BigInt& gc = g.leading_coeff();
        while (!rem.is_zero()) {
            const Exps& re = rem.leading_exps();
            Exps qe(f.nvars_);
            for (int i = 0; i < f.nvars_; ++i) {
                qe[i] = re[i] - ge[i];
                if (qe[i] < 0) return std::nullopt;
            }
            BigInt qc;
            if (rem.p_ == 0) {
                qc = rem.leading_coeff() / gc;
                if (qc * gc != rem.leading_coeff()) return std::nullopt;
            } else {
                qc = mod_div_(rem.leading_coeff(), gc, rem.p_);
            }
            ParamPoly t(f.p_, f.nvars_);
            t.add_term(qe, qc);
            q = q + t;
            rem = rem - t * g;
        }
        return q;
    }

    /// Exact division; throws if the division is not exact.
    friend ParamPoly divide_exact(const ParamPoly& f, const ParamPoly& g) {
        if (g.is_zero()) throw DivideByZero("ParamPoly division by zero");
        auto q = try_divide_exact(f, g);
        if (!q) throw std::runtime_error("divide_exact: not divisible");
        return *q;
    }

    /// The monomial-with-coefficient content: per-variable minimum exponents
    /// together with the integer content (char 0) or 1 (char p).
    ParamPoly monomial_content() const {
        ParamPoly r(p_, nvars_);
        if (is_zero()) return r;
        Exps e = terms_.begin()->first;
        BigInt cg = p_ == 0 ? BigInt(0) : BigInt(1);
        for (const auto& [fe, fc] : terms_) {
            for (int i = 0; i < nvars_; ++i) e[i] = std::min(e[i], fe[i]);
            if (p_ == 0) cg = boost::multiprecision::gcd(cg, fc);
        }
        r.add_term(e, cg);
        return r;
    }

    /// GCD over Z[params] (char 0, including integer content) or
    /// F_p[params] (normalized monic).  Content/primitive-part recursion on
    /// the highest parameter present, after stripping the cheap monomial
    /// content from both sides.
    friend ParamPoly poly_gcd(const ParamPoly& a, const ParamPoly& b) {
        if (a.is_zero()) return normalize_sign_(b);
        if (b.is_zero()) return normalize_sign_(a);
        if (a == b) return normalize_sign_(a);

        // monomial fast path
        if (a.is_monomial() || b.is_monomial()) return monomial_gcd_(a, b);

        if (a.is_constant() && b.is_constant()) {
            if (a.p_ != 0) return constant(a.p_, a.nvars_, 1);
            return constant(0, a.nvars_, boost::multiprecision::gcd(a.constant_value(),
                                                                    b.constant_value()));
        }

        ParamPoly ma = a.monomial_content(), mb = b.monomial_content();
        ParamPoly g_mono = monomial_gcd_(ma, mb);
        ParamPoly aa = ma.is_one() ? a : divide_exact(a, ma);
        ParamPoly bb = mb.is_one() ? b : divide_exact(b, mb);
        if (aa == bb) return normalize_sign_(g_mono * aa);
        if (aa.is_constant() || bb.is_constant()) {
            // stripped parts share no monomial factor; a constant side forces
            // a constant gcd, already captured by g_mono
            if (aa.p_ != 0) return normalize_sign_(g_mono);
            return normalize_sign_(g_mono * constant(0, a.nvars_,
                boost::multiprecision::gcd(aa.int_content_(), bb.int_content_())));
        }

        // dense Euclid for univariate polynomials over F_p
        if (a.p_ != 0) {
            int va = aa.single_var_(), vb = bb.single_var_();
            if (va >= 0 && va == vb)
                return normalize_sign_(g_mono * fp_univariate_gcd_(aa, bb, va));
        }

        int var = -1;
        for (int v = aa.nvars_ - 1; v >= 0; --v)
            if (aa.depends_on(v) || bb.depends_on(v)) { var = v; break; }
        if (var < 0) return normalize_sign_(g_mono);

        ParamPoly ca = aa.content_(var), cb = bb.content_(var);
        ParamPoly pa = ca.is_one() ? aa : divide_exact(aa, ca);
        ParamPoly pb = cb.is_one() ? bb : divide_exact(bb, cb);
        ParamPoly cont = poly_gcd(ca, cb);

        // modular degree probe: a certified upper bound for the gcd degree
        // in the main variable, since main-variable leading coefficients
        // multiply along divisors
        int dbound = std::min(pa.degree_in(var), pb.degree_in(var));
        if (a.p_ == 0) {
            for (int attempt = 0; attempt < 2 && dbound > 0; ++attempt) {
                int d = modular_degree_probe_(pa, pb, var, attempt);
                if (d >= 0) dbound = std::min(dbound, d);
            }
            if (dbound == 0) return normalize_sign_(g_mono * cont);
        }

        ParamPoly prim = primitive_prs_gcd_(pa, pb, var, dbound);
        return normalize_sign_(g_mono * cont * prim);
    }

    /// Leading-coefficient normalization: char 0 -> positive leading integer
    /// coefficient under grlex; char p -> coefficients already in [0,p).
    static ParamPoly normalize_sign_(const ParamPoly& f) {
        if (f.is_zero() || f.p_ != 0) return f;
        if (f.leading_coeff() > 0) return f;
        return -f;
    }

    std::string to_string(const std::vector<std::string>& names) const;

private:
    BigInt reduce_coeff_(const BigInt& c) const {
        if (p_ == 0) return c;
        BigInt r = c % p_;
        if (r < 0) r += p_;
        return r;
    }

    static ParamPoly merge_(const ParamPoly& a, const ParamPoly& b, bool minus) {
        ParamPoly r(a.p_, a.nvars_);
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        GrlexGreater gt;
        size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j >= b.terms_.size() ||
                (i < a.terms_.size() && gt(a.terms_[i].first, b.terms_[j].first))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i >= a.terms_.size() || gt(b.terms_[j].first, a.terms_[i].first)) {
                BigInt c = r.reduce_coeff_(minus ? -b.terms_[j].second : b.terms_[j].second);
                if (c != 0) r.terms_.emplace_back(b.terms_[j].first, std::move(c));
                ++j;
            } else {
                BigInt c = minus ? BigInt(a.terms_[i].second - b.terms_[j].second)
                                 : BigInt(a.terms_[i].second + b.terms_[j].second);
                c = r.reduce_coeff_(c);
                if (c != 0) r.terms_.emplace_back(a.terms_[i].first, std::move(c));
                ++i;
                ++j;
            }
        }
        return r;
    }

    // multiplying by a single term shifts all exponents uniformly, which
    // preserves the grlex order
    static ParamPoly scaled_by_term_(const ParamPoly& a, const Term& t) {
        ParamPoly r(a.p_, a.nvars_);
        r.terms_.reserve(a.terms_.size());
        for (const auto& [e, c] : a.terms_) {
            Exps ee(a.nvars_);
            for (int i = 0; i < a.nvars_; ++i) ee[i] = e[i] + t.first[i];
            BigInt cc = r.reduce_coeff_(c * t.second);
            if (cc != 0) r.terms_.emplace_back(std::move(ee), std::move(cc));
        }
        return r;
    }

    static BigInt exact_int_div_(const BigInt& a, const BigInt& b) {
        BigInt q = a / b;
        if (q * b != a) throw std::runtime_error("divide_exact: coefficient not divisible");
        return q;
    }

    static BigInt mod_div_(const BigInt& a, const BigInt& b, long p) {
        BigInt inv = boost::multiprecision::powm(b, BigInt(p - 2), BigInt(p));
        BigInt r = (a * inv) % p;
        if (r < 0) r += p;
        return r;
    }

    BigInt int_content_() const {
        BigInt g(0);
        for (const auto& [e, c] : terms_) g = boost::multiprecision::gcd(g, c);
        return g;
    }

    /// Index of the single variable present, or -1 if none or several.
    int single_var_() const {
        int var = -1;
        for (int v = 0; v < nvars_; ++v) {
            if (depends_on(v)) {
                if (var >= 0) return -1;
                var = v;
            }
        }
        return var;
    }

    /// Dense Euclid over F_p, univariate.
    static ParamPoly fp_univariate_gcd_(const ParamPoly& a, const ParamPoly& b, int var) {
        const long p = a.p_;
        auto to_dense = [&](const ParamPoly& f) {
            std::vector<BigInt> d(f.degree_in(var) + 1, BigInt(0));
            for (const auto& [e, c] : f.terms_) d[e[var]] = c;
            return d;
        };
        auto deg = [](const std::vector<BigInt>& d) {
            int n = static_cast<int>(d.size()) - 1;
            while (n >= 0 && d[n] == 0) --n;
            return n;
        };
        std::vector<BigInt> u = to_dense(a), v = to_dense(b);
        int du = deg(u), dv = deg(v);
        if (du < dv) { std::swap(u, v); std::swap(du, dv); }
        while (dv >= 0) {
            BigInt inv = boost::multiprecision::powm(v[dv], BigInt(p - 2), BigInt(p));
            while (du >= dv) {
                BigInt f = (u[du] * inv) % p;
                if (f != 0) {
                    for (int i = 0; i <= dv; ++i) {
                        u[du - dv + i] = (u[du - dv + i] - f * v[i]) % p;
                        if (u[du - dv + i] < 0) u[du - dv + i] += p;
                    }
                }
                --du;
                while (du >= 0 && u[du] == 0) --du;
            }
            std::swap(u, v);
            std::swap(du, dv);
        }
        // monic
        BigInt inv = boost::multiprecision::powm(u[du], BigInt(p - 2), BigInt(p));
        ParamPoly g(p, a.nvars_);
        for (int i = 0; i <= du; ++i) {
            if (u[i] == 0) continue;
            Exps e(a.nvars_, 0);
            e[var] = i;
            g.add_term(e, (u[i] * inv) % p);
        }
        return g;
    }

    // ---- modular degree probe ------------------------------------------

    static uint64_t splitmix64_(uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    static uint64_t mulmod_(uint64_t a, uint64_t b, uint64_t q) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
    }

    static uint64_t powmod_(uint64_t b, uint64_t e, uint64_t q) {
        uint64_t r = 1;
        b %= q;
        while (e) {
            if (e & 1) r = mulmod_(r, b, q);
            b = mulmod_(b, b, q);
            e >>= 1;
        }
        return r;
    }

    /// Image of the polynomial as a dense univariate poly in `var` over
    /// F_q, substituting fixed residues for the other variables.
    std::vector<uint64_t> modular_univariate_image_(int var, uint64_t q,
                                                    const std::vector<uint64_t>& pt) const {
        std::vector<uint64_t> img(degree_in(var) + 1, 0);
        for (const auto& [e, c] : terms_) {
            BigInt cm = c % static_cast<long long>(q);
            if (cm < 0) cm += static_cast<long long>(q);
            uint64_t t = static_cast<uint64_t>(cm);
            for (int v = 0; v < nvars_; ++v)
                if (v != var && e[v] != 0) t = mulmod_(t, powmod_(pt[v], e[v], q), q);
            img[e[var]] = (img[e[var]] + t) % q;
        }
        return img;
    }

    static int dense_gcd_degree_(std::vector<uint64_t> u, std::vector<uint64_t> v,
                                 uint64_t q) {
        auto deg = [](const std::vector<uint64_t>& d) {
            int n = static_cast<int>(d.size()) - 1;
            while (n >= 0 && d[n] == 0) --n;
            return n;
        };
        int du = deg(u), dv = deg(v);
        if (du < dv) { std::swap(u, v); std::swap(du, dv); }
        while (dv >= 0) {
            uint64_t inv = powmod_(v[dv], q - 2, q);
            while (du >= dv) {
                uint64_t f = mulmod_(u[du], inv, q);
                if (f) {
                    uint64_t nf = q - f;
                    for (int i = 0; i <= dv; ++i)
                        u[du - dv + i] = (u[du - dv + i] + mulmod_(nf, v[i], q)) % q;
                }
                while (du >= 0 && u[du] == 0) --du;
            }
            std::swap(u, v);
            std::swap(du, dv);
        }
        return du;
    }

    /// Certified upper bound for deg_var(gcd(a,b)): evaluate the other
    /// variables at fixed pseudo-random residues mod a machine prime and take
    /// the univariate gcd degree.  Valid whenever neither leading coefficient
    /// vanishes at the point (leading coefficients in the main variable
    /// multiply along factorizations); returns -1 when the attempt is
    /// unusable.
    static int modular_degree_probe_(const ParamPoly& a, const ParamPoly& b, int var,
                                     int attempt) {
        constexpr uint64_t q = (1ull << 61) - 1;
        std::vector<uint64_t> pt(a.nvars_);
        for (int v = 0; v < a.nvars_; ++v) {
            pt[v] = splitmix64_(0xABCD1234u + 7919u * attempt + v) % (q - 1) + 1;
        }
        auto ia = a.modular_univariate_image_(var, q, pt);
        auto ib = b.modular_univariate_image_(var, q, pt);
        if (ia.empty() || ib.empty()) return -1;
        if (ia.back() == 0 || ib.back() == 0) return -1; // leading coeff vanished
        return dense_gcd_degree_(std::move(ia), std::move(ib), q);
    }

    static ParamPoly monomial_gcd_(const ParamPoly& a, const ParamPoly& b) {
        // gcd of exponent-min monomial across all terms, with coefficient gcd
        Exps e(a.nvars_, 0);
        bool first = true;
        BigInt cg(0);
        auto absorb = [&](const ParamPoly& f) {
            for (const auto& [fe, fc] : f.terms()) {
                if (first) {
                    e = fe;
                    first = false;
                } else {
                    for (int i = 0; i < a.nvars_; ++i) e[i] = std::min(e[i], fe[i]);
                }
                if (a.p_ == 0) cg = boost::multiprecision::gcd(cg, fc);
            }
        };
        absorb(a);
        absorb(b);
        ParamPoly r(a.p_, a.nvars_);
        r.add_term(e, a.p_ == 0 ? cg : BigInt(1));
        return r;
    }

    /// Integer (or F_p) content together with the content polynomial w.r.t.
    /// one variable: gcd of the coefficient polynomials of v^i.
    ParamPoly content_(int var) const {
        std::map<int, ParamPoly> coeffs;
        for (const auto& [e, c] : terms_) {
            int d = e[var];
            Exps rest = e;
            rest[var] = 0;
            auto it = coeffs.find(d);
            if (it == coeffs.end()) it = coeffs.emplace(d, ParamPoly(p_, nvars_)).first;
            it->second.add_term(rest, c);
        }
        ParamPoly g(p_, nvars_);
        for (const auto& [d, cf] : coeffs) g = poly_gcd(g, cf);
        return g;
    }

    /// Primitive pseudo-remainder sequence gcd of primitive polys in var.
    /// When a certified degree bound is known, a candidate of that degree is
    /// tried by exact division as soon as it appears.
    static ParamPoly primitive_prs_gcd_(ParamPoly f, ParamPoly g, int var,
                                        int degree_bound = -1) {
        const ParamPoly a0 = f, b0 = g;
        if (f.degree_in(var) < g.degree_in(var)) std::swap(f, g);
        while (!g.is_zero()) {
            if (degree_bound >= 0 && g.degree_in(var) <= degree_bound) {
                ParamPoly cand = divide_exact(g, g.content_(var));
                cand = normalize_sign_(cand);
                if (try_divide_exact(a0, cand) && try_divide_exact(b0, cand)) return cand;
                degree_bound = g.degree_in(var) - 1;
            }
            ParamPoly r = pseudo_rem_(f, g, var);
            f = g;
            if (r.is_zero()) {
                g = r;
            } else {
                ParamPoly c = r.content_(var);
                g = divide_exact(r, c);
            }
        }
        ParamPoly c = f.content_(var);
        ParamPoly pp = divide_exact(f, c);
        if (f.p_ != 0) {
            // make monic over F_p
            ParamPoly lc = pp.lead_coeff_in_(var);
            if (lc.is_constant() && !lc.is_one())
                pp = divide_exact(pp, lc);
        }
        return pp;
    }

    ParamPoly lead_coeff_in_(int var) const {
        int d = degree_in(var);
        ParamPoly lc(p_, nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == d) {
                Exps rest = e;
                rest[var] = 0;
                lc.add_term(rest, c);
            }
        }
        return lc;
    }

    /// prem(f, g) wrt var: lc(g)^(deg f - deg g + 1) * f = q*g + r.
    static ParamPoly pseudo_rem_(const ParamPoly& f, const ParamPoly& g, int var) {
        int df = f.degree_in(var), dg = g.degree_in(var);
        if (df < dg) return f;
        ParamPoly lcg = g.lead_coeff_in_(var);
        ParamPoly r = f;
        while (!r.is_zero() && r.degree_in(var) >= dg) {
            int dr = r.degree_in(var);
            ParamPoly lcr = r.lead_coeff_in_(var);
            ParamPoly shift = variable(f.p_, f.nvars_, var, dr - dg);
            if (dr == dg) shift = constant(f.p_, f.nvars_, 1);
            r = r * lcg - lcr * shift * g;
        }
        return r;
    }

    long p_;
    int nvars_;
    TermMap terms_;
};

inline std::string ParamPoly::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        BigInt coeff = c;
        bool neg = coeff < 0;
        if (neg) coeff = -coeff;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        std::string mono;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += names[i];
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty()) {
            out += coeff.str();
        } else {
            if (coeff != 1) out += coeff.str() + "*";
            out += mono;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scalar: element of Frac(F[params])
// ---------------------------------------------------------------------------

/// An exact element of the fraction field K = Frac(F[params]).  The fraction
/// is always reduced; in characteristic 0 numerator and denominator are
/// integer-primitive with positive leading denominator coefficient, in
/// characteristic p the denominator is monic (graded lex).
class Scalar {
public:
    explicit Scalar(FieldPtr field)
        : field_(std::move(field)),
          num_(field_->characteristic(), field_->nparams()),
          den_(ParamPoly::constant(field_->characteristic(), field_->nparams(), 1)) {}

    Scalar(FieldPtr field, ParamPoly num, ParamPoly den)
        : field_(std::move(field)), num_(std::move(num)), den_(std::move(den)) {
        reduce_();
    }

    static Scalar zero(const FieldPtr& f) { return Scalar(f); }

    static Scalar one(const FieldPtr& f) { return from_int(f, 1); }

    static Scalar from_int(const FieldPtr& f, const BigInt& n) {
        Scalar s(f);
        s.num_ = ParamPoly::constant(f->characteristic(), f->nparams(), n);
        return s;
    }

    static Scalar param(const FieldPtr& f, int idx) {
        Scalar s(f);
        s.num_ = ParamPoly::variable(f->characteristic(), f->nparams(), idx);
        return s;
    }

    static Scalar param(const FieldPtr& f, const std::string& name) {
        int idx = f->param_index(name);
        if (idx < 0) throw std::invalid_argument("unknown parameter: " + name);
        return param(f, idx);
    }

    static Scalar rational(const FieldPtr& f, const BigInt& num, const BigInt& den) {
        return Scalar(f, ParamPoly::constant(f->characteristic(), f->nparams(), num),
                      ParamPoly::constant(f->characteristic(), f->nparams(), den));
    }

    const FieldPtr& field() const { return field_; }
    const ParamPoly& num() const { return num_; }
    const ParamPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }

    /// Nonzero element of the coefficient field itself: this module's reading
    /// of membership in k^x (nonzero; parameter dependence is queried
    /// separately via uses_param).
    bool is_prime_field_unit() const { return !is_zero(); }

    bool is_rational_constant() const { return num_.is_constant() && den_.is_constant(); }

    bool uses_param(int idx) const { return num_.depends_on(idx) || den_.depends_on(idx); }

    /// True when no parameter with index >= from appears.
    bool free_of_params_from(int from) const {
        for (int i = from; i < field_->nparams(); ++i)
            if (uses_param(i)) return false;
        return true;
    }

    Scalar operator-() const {
        Scalar r = *this;
        r.num_ = -r.num_;
        r.normalize_only_();
        return r;
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return add_sub_(a, b, false); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return add_sub_(a, b, true); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        a.check_field_(b);
        if (a.is_zero() || b.is_zero()) return zero(a.field_);
        // cross-reduce first so the final fraction is already coprime
        ParamPoly g1 = poly_gcd(a.num_, b.den_);
        ParamPoly g2 = poly_gcd(b.num_, a.den_);
        ParamPoly num = (g1.is_one() ? a.num_ : divide_exact(a.num_, g1)) *
                        (g2.is_one() ? b.num_ : divide_exact(b.num_, g2));
        ParamPoly den = (g2.is_one() ? a.den_ : divide_exact(a.den_, g2)) *
                        (g1.is_one() ? b.den_ : divide_exact(b.den_, g1));
        Scalar r(a.field_);
        r.num_ = std::move(num);
        r.den_ = std::move(den);
        r.normalize_only_();
        return r;
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        a.check_field_(b);
        if (b.is_zero()) throw DivideByZero();
        return a * b.inverse();
    }

    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }
    Scalar& operator/=(const Scalar& b) { return *this = *this / b; }

    Scalar inverse() const {
        if (is_zero()) throw DivideByZero("inverse of zero");
        return Scalar(field_, den_, num_);
    }

    Scalar pow(long k) const {
        if (k < 0) return inverse().pow(-k);
        Scalar r = one(field_);
        Scalar base = *this;
        while (k > 0) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// Embed into a field with a superset of the parameters (matched by name).
    Scalar lift_to(const FieldPtr& big) const {
        std::vector<int> remap(field_->nparams());
        for (int i = 0; i < field_->nparams(); ++i) {
            remap[i] = big->param_index(field_->params()[i]);
            if (remap[i] < 0)
                throw std::invalid_argument("lift_to: parameter missing in target field");
        }
        auto lift_poly = [&](const ParamPoly& f) {
            ParamPoly g(big->characteristic(), big->nparams());
            for (const auto& [e, c] : f.terms()) {
                Exps ee(big->nparams(), 0);
                for (int i = 0; i < field_->nparams(); ++i) ee[remap[i]] = e[i];
                g.add_term(ee, c);
            }
            return g;
        };
        return Scalar(big, lift_poly(num_), lift_poly(den_));
    }

    std::string to_string() const {
        std::string n = num_.to_string(field_->params());
        if (den_.is_one()) return n;
        std::string d = den_.to_string(field_->params());
        auto compound = [](const std::string& s) {
            return s.find_first_of("+-* ") != std::string::npos;
        };
        std::string out = compound(n) ? "(" + n + ")" : n;
        out += "/";
        out += compound(d) || d.find('^') != std::string::npos ? "(" + d + ")" : d;
        return out;
    }

    static Scalar parse(const FieldPtr& field, const std::string& text);

private:
    void check_field_(const Scalar& o) const {
        if (field_.get() == o.field_.get()) return;
        if (!field_->same_as(*o.field_))
            throw std::invalid_argument("scalar field mismatch");
    }

    /// Henrici addition: gcds run on component pairs only, and the result is
    /// reduced without a full-size final gcd.
    static Scalar add_sub_(const Scalar& a, const Scalar& b, bool minus) {
        a.check_field_(b);
        if (a.is_zero()) return minus ? -b : b;
        if (b.is_zero()) return a;
        ParamPoly g0 = poly_gcd(a.den_, b.den_);
        ParamPoly da = g0.is_one() ? a.den_ : divide_exact(a.den_, g0);
        ParamPoly db = g0.is_one() ? b.den_ : divide_exact(b.den_, g0);
        ParamPoly t = minus ? a.num_ * db - b.num_ * da : a.num_ * db + b.num_ * da;
        Scalar r(a.field_);
        if (t.is_zero()) return r;
        if (!g0.is_one()) {
            ParamPoly g1 = poly_gcd(t, g0);
            if (!g1.is_one()) {
                t = divide_exact(t, g1);
                g0 = divide_exact(g0, g1);
            }
        }
        r.num_ = std::move(t);
        r.den_ = da * db * g0;
        r.normalize_only_();
        return r;
    }

    void reduce_() {
        if (den_.is_zero()) throw DivideByZero("zero denominator");
        if (num_.is_zero()) {
            den_ = ParamPoly::constant(field_->characteristic(), field_->nparams(), 1);
            return;
        }
        if (!den_.is_one()) {
            ParamPoly g = poly_gcd(num_, den_);
            if (!g.is_one()) {
                num_ = divide_exact(num_, g);
                den_ = divide_exact(den_, g);
            }
        }
        normalize_only_();
    }

    /// Sign/monic normalization on an already reduced fraction.
    void normalize_only_() {
        if (num_.is_zero()) {
            den_ = ParamPoly::constant(field_->characteristic(), field_->nparams(), 1);
            return;
        }
        if (field_->characteristic() == 0) {
            if (den_.leading_coeff() < 0) {
                num_ = -num_;
                den_ = -den_;
            }
        } else {
            const BigInt& lc = den_.leading_coeff();
            if (lc != 1) {
                ParamPoly u = ParamPoly::constant(field_->characteristic(),
                                                  field_->nparams(), lc);
                num_ = divide_exact(num_, u);
                den_ = divide_exact(den_, u);
            }
        }
    }

    FieldPtr field_;
    ParamPoly num_, den_;
};

// ---------------------------------------------------------------------------
// Scalar expression parser
// ---------------------------------------------------------------------------

namespace detail {

struct Lexer {
    enum Kind { Num, Ident, Op, End };
    explicit Lexer(const std::string& s) : s_(s) { advance(); }

    Kind kind = End;
    std::string text;

    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ >= s_.size()) {
            kind = End;
            text.clear();
            return;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = pos_;
            while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
            text = s_.substr(pos_, j - pos_);
            pos_ = j;
            kind = Num;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = pos_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            text = s_.substr(pos_, j - pos_);
            pos_ = j;
            kind = Ident;
            return;
        }
        text = std::string(1, c);
        ++pos_;
        kind = Op;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace detail

inline Scalar Scalar::parse(const FieldPtr& field, const std::string& text) {
    detail::Lexer lex(text);

    // recursive descent: expr := term (('+'|'-') term)*
    //                    term := factor (('*'|'/') factor)*
    //                    factor := atom ('^' int)? | '-' factor
    //                    atom := number | param | '(' expr ')'
    struct Parser {
        detail::Lexer& lx;
        const FieldPtr& f;

        Scalar expr() {
            Scalar v = term();
            while (lx.kind == detail::Lexer::Op && (lx.text == "+" || lx.text == "-")) {
                bool plus = lx.text == "+";
                lx.advance();
                Scalar w = term();
                v = plus ? v + w : v - w;
            }
            return v;
        }
        Scalar term() {
            Scalar v = factor();
            while (lx.kind == detail::Lexer::Op && (lx.text == "*" || lx.text == "/")) {
                bool mul = lx.text == "*";
                lx.advance();
                Scalar w = factor();
                v = mul ? v * w : v / w;
            }
            return v;
        }
        Scalar factor() {
            if (lx.kind == detail::Lexer::Op && lx.text == "-") {
                lx.advance();
                return -factor();
            }
            Scalar v = atom();
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
                v = v.pow(neg ? -e : e);
            }
            return v;
        }
        Scalar atom() {
            if (lx.kind == detail::Lexer::Num) {
                BigInt n(lx.text);
                lx.advance();
                return Scalar::from_int(f, n);
            }
            if (lx.kind == detail::Lexer::Ident) {
                std::string name = lx.text;
                lx.advance();
                return Scalar::param(f, name);
            }
            if (lx.kind == detail::Lexer::Op && lx.text == "(") {
                lx.advance();
                Scalar v = expr();
                if (!(lx.kind == detail::Lexer::Op && lx.text == ")"))
                    throw ParseError("expected ')'");
                lx.advance();
                return v;
            }
            throw ParseError("unexpected token '" + lx.text + "'");
        }
    };

    Parser p{lex, field};
    Scalar v = p.expr();
    if (lex.kind != detail::Lexer::End) throw ParseError("trailing input: '" + lex.text + "'");
    return v;
}

} // namespace twistlab

#endif
