#include "kvol/field.hpp"

#include <mpfr.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace kvol {

namespace {

using Poly = std::vector<mpz_class>;

void trim(Poly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

// Exact division by a monic polynomial; throws if the remainder is non-zero.
Poly divide_exact(Poly a, const Poly& b) {
    const size_t db = b.size() - 1;
    if (a.size() < b.size()) throw std::logic_error("divide_exact: degree");
    Poly q(a.size() - db, 0);
    for (size_t k = a.size(); k-- > db;) {
        mpz_class c = a[k];
        if (c == 0) continue;
        q[k - db] = c;
        for (size_t i = 0; i <= db; ++i) a[k - db + i] -= c * b[i];
    }
    for (const auto& r : a)
        if (r != 0) throw std::logic_error("divide_exact: non-zero remainder");
    trim(q);
    return q;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

int env_precision() {
    static const int bits = [] {
        const char* s = std::getenv("KVOL_PRECISION_BITS");
        if (!s) return 53;
        int v = std::atoi(s);
        return v >= 16 ? v : 53;
    }();
    return bits;
}

double mpz_to_double(const mpz_class& z) { return z.get_d(); }

struct MpfrVar {
    mpfr_t v;
    explicit MpfrVar(int bits) { mpfr_init2(v, bits); }
    ~MpfrVar() { mpfr_clear(v); }
    MpfrVar(const MpfrVar&) = delete;
    MpfrVar& operator=(const MpfrVar&) = delete;
};

// Rigorous enclosure of sum num[i] Phi^i at the given precision.
void enclose_numerator(const CycloReal& a, int bits, mpfr_t lo, mpfr_t hi) {
    const int n = a.n();
    MpfrVar pi_lo(bits + 8), pi_hi(bits + 8), th_lo(bits + 8), th_hi(bits + 8);
    mpfr_const_pi(pi_lo.v, MPFR_RNDD);
    mpfr_const_pi(pi_hi.v, MPFR_RNDU);
    mpfr_div_ui(th_lo.v, pi_lo.v, static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_div_ui(th_hi.v, pi_hi.v, static_cast<unsigned long>(n), MPFR_RNDU);
    MpfrVar ph_lo(bits + 8), ph_hi(bits + 8);
    // cos is decreasing on [0, pi/2].
    mpfr_cos(ph_lo.v, th_hi.v, MPFR_RNDD);
    mpfr_cos(ph_hi.v, th_lo.v, MPFR_RNDU);
    mpfr_mul_ui(ph_lo.v, ph_lo.v, 2, MPFR_RNDD);
    mpfr_mul_ui(ph_hi.v, ph_hi.v, 2, MPFR_RNDU);

    MpfrVar p_lo(bits + 8), p_hi(bits + 8), t(bits + 8);
    mpfr_set_ui(p_lo.v, 1, MPFR_RNDN);
    mpfr_set_ui(p_hi.v, 1, MPFR_RNDN);
    mpfr_set_ui(lo, 0, MPFR_RNDN);
    mpfr_set_ui(hi, 0, MPFR_RNDN);
    const auto& num = a.numerators();
    for (size_t i = 0; i < num.size(); ++i) {
        if (i > 0) {
            mpfr_mul(p_lo.v, p_lo.v, ph_lo.v, MPFR_RNDD);
            mpfr_mul(p_hi.v, p_hi.v, ph_hi.v, MPFR_RNDU);
        }
        const mpz_class& c = num[i];
        if (c == 0) continue;
        if (c > 0) {
            mpfr_mul_z(t.v, p_lo.v, c.get_mpz_t(), MPFR_RNDD);
            mpfr_add(lo, lo, t.v, MPFR_RNDD);
            mpfr_mul_z(t.v, p_hi.v, c.get_mpz_t(), MPFR_RNDU);
            mpfr_add(hi, hi, t.v, MPFR_RNDU);
        } else {
            mpfr_mul_z(t.v, p_hi.v, c.get_mpz_t(), MPFR_RNDD);
            mpfr_add(lo, lo, t.v, MPFR_RNDD);
            mpfr_mul_z(t.v, p_lo.v, c.get_mpz_t(), MPFR_RNDU);
            mpfr_add(hi, hi, t.v, MPFR_RNDU);
        }
    }
}

using big = boost::multiprecision::cpp_bin_float_50;

// Best rational approximation with denominator at most max_den.
mpq_class rationalize(const big& x, const mpz_class& max_den) {
    big v = x;
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 200; ++it) {
        big fl = floor(v);
        if (abs(fl) > big("9e18")) break;
        mpz_class a(static_cast<long>(fl.convert_to<long long>()));
        mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        big frac = v - fl;
        if (abs(frac) < big("1e-40")) break;
        v = 1 / frac;
    }
    if (q1 == 0) return mpq_class(0);
    mpq_class r(p1, q1);
    r.canonicalize();
    return r;
}

}  // namespace

std::string MinPoly::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const mpz_class& c = coefficients[static_cast<size_t>(k)];
        if (c == 0) continue;
        mpz_class a = abs(c);
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        if (a != 1 || k == 0) os << a.get_str();
        if (k > 0) os << "x";
        if (k > 1) os << "^" << k;
    }
    return os.str();
}

std::vector<mpz_class> cyclotomic_polynomial(int m) {
    if (m < 1) throw std::invalid_argument("cyclotomic_polynomial: m must be positive");
    static std::mutex mu;
    static std::map<int, Poly> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(m);
        if (it != memo.end()) return it->second;
    }
    Poly p(static_cast<size_t>(m) + 1, 0);
    p[0] = -1;
    p[static_cast<size_t>(m)] = 1;
    for (int d = 1; d < m; ++d)
        if (m % d == 0) p = divide_exact(p, cyclotomic_polynomial(d));
    std::lock_guard<std::mutex> lock(mu);
    memo[m] = p;
    return p;
}

MinPoly minimal_polynomial(int n) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("minimal_polynomial: n must be even and >= 4");
    Poly c = cyclotomic_polynomial(2 * n);
    const int two_d = static_cast<int>(c.size()) - 1;
    const int d = two_d / 2;
    // z^{-d} Phi_{2n}(z) = c_d + sum_k c_{d+k} (z^k + z^{-k}); z^k + z^{-k} = p_k(z + 1/z).
    std::vector<Poly> pk;
    pk.push_back(Poly{2});
    pk.push_back(Poly{0, 1});
    for (int k = 2; k <= d; ++k) {
        Poly next(static_cast<size_t>(k) + 1, 0);
        const Poly& a = pk[static_cast<size_t>(k - 1)];
        const Poly& b = pk[static_cast<size_t>(k - 2)];
        for (size_t i = 0; i < a.size(); ++i) next[i + 1] += a[i];
        for (size_t i = 0; i < b.size(); ++i) next[i] -= b[i];
        pk.push_back(next);
    }
    Poly out(static_cast<size_t>(d) + 1, 0);
    out[0] = c[static_cast<size_t>(d)];
    for (int k = 1; k <= d; ++k) {
        const Poly& p = pk[static_cast<size_t>(k)];
        for (size_t i = 0; i < p.size(); ++i) out[i] += c[static_cast<size_t>(d + k)] * p[i];
    }
    trim(out);
    MinPoly mp;
    mp.n = n;
    mp.coefficients = out;
    return mp;
}

FieldContext::FieldContext(int n) : n_(n), poly_(minimal_polynomial(n)) {
    const long double ph = 2.0L * std::cos(3.14159265358979323846264338327950288L / n);
    long double p = 1.0L;
    for (int k = 0; k < 2 * poly_.degree() + 1; ++k) {
        phi_pow_.push_back(static_cast<double>(p));
        p *= ph;
    }
}

void FieldContext::reduce(std::vector<mpz_class>& c) const {
    const int d = degree();
    const auto& m = poly_.coefficients;
    for (int k = static_cast<int>(c.size()) - 1; k >= d; --k) {
        mpz_class top = c[static_cast<size_t>(k)];
        if (top == 0) continue;
        for (int i = 0; i < d; ++i) c[static_cast<size_t>(k - d + i)] -= top * m[static_cast<size_t>(i)];
        c[static_cast<size_t>(k)] = 0;
    }
    c.resize(static_cast<size_t>(d));
}

const FieldContext& field_context(int n) {
    static std::map<int, std::unique_ptr<FieldContext>> registry;
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry.find(n);
    if (it != registry.end()) return *it->second;
    auto ctx = std::make_unique<FieldContext>(n);
    const FieldContext& ref = *ctx;
    registry.emplace(n, std::move(ctx));
    return ref;
}

// ---------------------------------------------------------------- CycloReal

CycloReal CycloReal::zero(int n) {
    CycloReal r;
    r.ctx_ = &field_context(n);
    r.num_.assign(static_cast<size_t>(r.ctx_->degree()), 0);
    r.den_ = 1;
    return r;
}

CycloReal CycloReal::integer(int n, long v) {
    CycloReal r = zero(n);
    r.num_[0] = v;
    return r;
}

CycloReal CycloReal::one(int n) { return integer(n, 1); }

CycloReal CycloReal::phi(int n) {
    CycloReal r = zero(n);
    if (r.num_.size() > 1) {
        r.num_[1] = 1;
    } else {
        // degree one field: Phi is rational (never happens for even n >= 4)
        throw std::logic_error("degree one field");
    }
    return r;
}

CycloReal CycloReal::rational(int n, const mpq_class& q) {
    CycloReal r = zero(n);
    r.num_[0] = q.get_num();
    r.den_ = q.get_den();
    r.normalize();
    return r;
}

CycloReal CycloReal::from_coeffs(int n, const std::vector<mpq_class>& coeffs) {
    CycloReal r = zero(n);
    mpz_class l = 1;
    for (const auto& q : coeffs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> num(std::max(coeffs.size(), r.num_.size()), 0);
    for (size_t i = 0; i < coeffs.size(); ++i) num[i] = coeffs[i].get_num() * (l / coeffs[i].get_den());
    r.ctx_->reduce(num);
    r.num_ = num;
    r.den_ = l;
    r.normalize();
    return r;
}

int CycloReal::n() const { return ctx_ ? ctx_->n() : 0; }
int CycloReal::degree() const { return ctx_ ? ctx_->degree() : 0; }

std::vector<mpq_class> CycloReal::coeffs() const {
    std::vector<mpq_class> out;
    out.reserve(num_.size());
    for (const auto& c : num_) {
        mpq_class q(c, den_);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

void CycloReal::normalize() {
    mpz_class g = den_;
    for (const auto& c : num_) {
        if (g == 1) break;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    }
    if (g != 1 && g != 0) {
        for (auto& c : num_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
    }
    if (den_ < 0) {
        den_ = -den_;
        for (auto& c : num_) c = -c;
    }
}

void CycloReal::require_same(const CycloReal& o) const {
    if (!ctx_ || !o.ctx_) throw std::logic_error("CycloReal: uninitialised operand");
    if (ctx_ != o.ctx_) throw std::invalid_argument("CycloReal: field mismatch");
}

bool CycloReal::is_zero() const {
    for (const auto& c : num_)
        if (c != 0) return false;
    return true;
}

bool CycloReal::is_rational() const {
    for (size_t i = 1; i < num_.size(); ++i)
        if (num_[i] != 0) return false;
    return true;
}

std::optional<mpq_class> CycloReal::as_rational() const {
    if (!is_rational()) return std::nullopt;
    mpq_class q(num_[0], den_);
    q.canonicalize();
    return q;
}

double CycloReal::to_double() const {
    if (!ctx_) return 0.0;
    bool small = mpz_sizeinbase(den_.get_mpz_t(), 2) < 900;
    for (const auto& c : num_) small = small && mpz_sizeinbase(c.get_mpz_t(), 2) < 900;
    if (small) {
        double s = 0.0;
        for (size_t i = num_.size(); i-- > 0;) s = s * ctx_->phi() + mpz_to_double(num_[i]);
        return s / mpz_to_double(den_);
    }
    Enclosure e = enclose(*this, 80);
    return 0.5 * (e.lo + e.hi);
}

int CycloReal::sign() const {
    if (!ctx_) throw std::logic_error("CycloReal: uninitialised");
    if (is_zero()) return 0;
    const int start = env_precision();
    if (start <= 53) {
        bool small = true;
        for (const auto& c : num_) small = small && mpz_sizeinbase(c.get_mpz_t(), 2) < 900;
        if (small) {
            double s = 0.0, m = 0.0;
            for (size_t i = 0; i < num_.size(); ++i) {
                double d = mpz_to_double(num_[i]) * ctx_->phi_power(static_cast<int>(i));
                s += d;
                m += std::fabs(d);
            }
            if (std::fabs(s) > 1e-13 * m) return s > 0 ? 1 : -1;
        }
    }
    for (int step = 0;; ++step) {
        int bits = ladder_bits(step);
        if (bits < start) continue;
        MpfrVar lo(bits), hi(bits);
        enclose_numerator(*this, bits, lo.v, hi.v);
        if (mpfr_sgn(lo.v) > 0) return 1;
        if (mpfr_sgn(hi.v) < 0) return -1;
        if (bits > (1 << 22)) throw std::runtime_error("CycloReal::sign: precision exhausted");
    }
}

CycloReal CycloReal::operator-() const {
    CycloReal r = *this;
    for (auto& c : r.num_) c = -c;
    return r;
}

CycloReal& CycloReal::operator+=(const CycloReal& o) {
    require_same(o);
    if (den_ == o.den_) {
        for (size_t i = 0; i < num_.size(); ++i) num_[i] += o.num_[i];
    } else {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den_.get_mpz_t(), o.den_.get_mpz_t());
        mpz_class fa = o.den_ / g, fb = den_ / g;
        for (size_t i = 0; i < num_.size(); ++i) num_[i] = num_[i] * fa + o.num_[i] * fb;
        den_ *= fa;
    }
    normalize();
    return *this;
}

CycloReal& CycloReal::operator-=(const CycloReal& o) {
    require_same(o);
    if (den_ == o.den_) {
        for (size_t i = 0; i < num_.size(); ++i) num_[i] -= o.num_[i];
    } else {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den_.get_mpz_t(), o.den_.get_mpz_t());
        mpz_class fa = o.den_ / g, fb = den_ / g;
        for (size_t i = 0; i < num_.size(); ++i) num_[i] = num_[i] * fa - o.num_[i] * fb;
        den_ *= fa;
    }
    normalize();
    return *this;
}

CycloReal operator*(const CycloReal& a, const CycloReal& b) {
    a.require_same(b);
    const size_t d = a.num_.size();
    std::vector<mpz_class> prod(2 * d - 1, 0);
    for (size_t i = 0; i < d; ++i) {
        if (a.num_[i] == 0) continue;
        for (size_t j = 0; j < d; ++j) {
            if (b.num_[j] == 0) continue;
            mpz_addmul(prod[i + j].get_mpz_t(), a.num_[i].get_mpz_t(), b.num_[j].get_mpz_t());
        }
    }
    a.ctx_->reduce(prod);
    CycloReal r;
    r.ctx_ = a.ctx_;
    r.num_ = std::move(prod);
    r.den_ = a.den_ * b.den_;
    r.normalize();
    return r;
}

CycloReal& CycloReal::operator*=(const CycloReal& o) {
    *this = *this * o;
    return *this;
}

CycloReal& CycloReal::operator*=(long k) {
    for (auto& c : num_) c *= k;
    normalize();
    return *this;
}

CycloReal CycloReal::inverse() const {
    if (!ctx_) throw std::logic_error("CycloReal: uninitialised");
    if (is_zero()) throw std::domain_error("CycloReal: division by zero");
    const int d = degree();
    // Columns of the multiplication-by-this matrix: this * Phi^j.
    std::vector<std::vector<mpq_class>> m(static_cast<size_t>(d), std::vector<mpq_class>(static_cast<size_t>(d) + 1));
    CycloReal col = *this;
    CycloReal ph = phi(n());
    for (int j = 0; j < d; ++j) {
        auto cj = col.coeffs();
        for (int i = 0; i < d; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = cj[static_cast<size_t>(i)];
        col = col * ph;
    }
    m[0][static_cast<size_t>(d)] = 1;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        while (piv < d && m[static_cast<size_t>(piv)][static_cast<size_t>(c)] == 0) ++piv;
        if (piv == d) throw std::logic_error("CycloReal::inverse: singular");
        std::swap(m[static_cast<size_t>(c)], m[static_cast<size_t>(piv)]);
        mpq_class inv = 1 / m[static_cast<size_t>(c)][static_cast<size_t>(c)];
        for (int k = c; k <= d; ++k) m[static_cast<size_t>(c)][static_cast<size_t>(k)] *= inv;
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            mpq_class f = m[static_cast<size_t>(r)][static_cast<size_t>(c)];
            if (f == 0) continue;
            for (int k = c; k <= d; ++k)
                m[static_cast<size_t>(r)][static_cast<size_t>(k)] -= f * m[static_cast<size_t>(c)][static_cast<size_t>(k)];
        }
    }
    std::vector<mpq_class> x(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] = m[static_cast<size_t>(i)][static_cast<size_t>(d)];
    return from_coeffs(n(), x);
}

CycloReal& CycloReal::operator/=(const CycloReal& o) {
    require_same(o);
    *this = *this * o.inverse();
    return *this;
}

CycloReal CycloReal::pow(unsigned e) const {
    CycloReal r = one(n()), b = *this;
    while (e) {
        if (e & 1u) r = r * b;
        e >>= 1u;
        if (e) b = b * b;
    }
    return r;
}

bool CycloReal::operator==(const CycloReal& o) const {
    if (ctx_ != o.ctx_) return false;
    return den_ == o.den_ && num_ == o.num_;
}

std::string CycloReal::to_string() const {
    if (!ctx_) return "<invalid>";
    std::ostringstream os;
    bool first = true;
    auto cs = coeffs();
    for (size_t k = cs.size(); k-- > 0;) {
        const mpq_class& c = cs[k];
        if (c == 0) continue;
        mpq_class a = abs(c);
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        if (k == 0) {
            os << a.get_str();
        } else {
            if (a != 1) os << a.get_str() << "*";
            os << "Phi";
            if (k > 1) os << "^" << k;
        }
    }
    if (first) os << "0";
    return os.str();
}

std::optional<CycloReal> CycloReal::sqrt() const {
    if (!ctx_) throw std::logic_error("CycloReal: uninitialised");
    const int s = sign();
    if (s == 0) return *this;
    if (s < 0) return std::nullopt;
    if (auto q = as_rational()) {
        mpz_class a = q->get_num(), b = q->get_den();
        if (mpz_perfect_square_p(a.get_mpz_t()) && mpz_perfect_square_p(b.get_mpz_t())) {
            mpz_class ra, rb;
            mpz_sqrt(ra.get_mpz_t(), a.get_mpz_t());
            mpz_sqrt(rb.get_mpz_t(), b.get_mpz_t());
            return rational(n(), mpq_class(ra, rb));
        }
    }
    const auto js = embedding_indices(n());
    const size_t d = js.size();
    const big pi = boost::math::constants::pi<big>();
    std::vector<big> nodes(d), roots(d);
    const auto cs = coeffs();
    for (size_t k = 0; k < d; ++k) {
        nodes[k] = 2 * cos(pi * js[k] / n());
        big v = 0;
        for (size_t i = cs.size(); i-- > 0;) {
            big ci = big(cs[i].get_num().get_str()) / big(cs[i].get_den().get_str());
            v = v * nodes[k] + ci;
        }
        if (v < big("-1e-30")) return std::nullopt;
        roots[k] = v > 0 ? boost::multiprecision::sqrt(v) : big(0);
    }
    // LU of the Vandermonde matrix.
    std::vector<std::vector<big>> lu(d, std::vector<big>(d));
    for (size_t r = 0; r < d; ++r) {
        big p = 1;
        for (size_t c = 0; c < d; ++c) {
            lu[r][c] = p;
            p *= nodes[r];
        }
    }
    std::vector<size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t c = 0; c < d; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < d; ++r)
            if (abs(lu[r][c]) > abs(lu[piv][c])) piv = r;
        std::swap(lu[c], lu[piv]);
        std::swap(perm[c], perm[piv]);
        for (size_t r = c + 1; r < d; ++r) {
            lu[r][c] /= lu[c][c];
            for (size_t k = c + 1; k < d; ++k) lu[r][k] -= lu[r][c] * lu[c][k];
        }
    }
    const mpz_class max_den = mpz_class("1000000000000000000") * den_;
    const size_t masks = size_t{1} << (d - 1);
    for (size_t mask = 0; mask < masks; ++mask) {
        std::vector<big> rhs(d);
        for (size_t k = 0; k < d; ++k) {
            bool neg = k > 0 && ((mask >> (k - 1)) & 1u);
            rhs[k] = neg ? big(-roots[k]) : roots[k];
        }
        std::vector<big> y(d);
        for (size_t r = 0; r < d; ++r) {
            big v = rhs[perm[r]];
            for (size_t k = 0; k < r; ++k) v -= lu[r][k] * y[k];
            y[r] = v;
        }
        std::vector<big> x(d);
        for (size_t r = d; r-- > 0;) {
            big v = y[r];
            for (size_t k = r + 1; k < d; ++k) v -= lu[r][k] * x[k];
            x[r] = v / lu[r][r];
        }
        std::vector<mpq_class> qc(d);
        for (size_t k = 0; k < d; ++k) qc[k] = rationalize(x[k], max_den);
        CycloReal cand = from_coeffs(n(), qc);
        if (cand * cand == *this) return cand.sign() < 0 ? -cand : cand;
    }
    return std::nullopt;
}

CycloReal operator+(CycloReal a, const CycloReal& b) { return a += b; }
CycloReal operator-(CycloReal a, const CycloReal& b) { return a -= b; }
CycloReal operator/(CycloReal a, const CycloReal& b) { return a /= b; }
CycloReal operator*(CycloReal a, long k) { return a *= k; }
CycloReal operator*(long k, CycloReal a) { return a *= k; }
CycloReal operator+(CycloReal a, long k) { return a += CycloReal::integer(a.n(), k); }
CycloReal operator-(CycloReal a, long k) { return a -= CycloReal::integer(a.n(), k); }

int compare(const CycloReal& a, const CycloReal& b) { return (a - b).sign(); }

CycloReal trig_value(int n, Trig kind, long k) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("trig_value: n must be even and >= 4");
    if (kind == Trig::Sin) return trig_value(n, Trig::Cos, n / 2 - k);
    const long period = 2L * n;
    long m = ((k % period) + period) % period;
    if (m > n) m = period - m;  // cos is even and 2pi periodic
    // cos(m pi/n) = T_m(Phi/2)
    CycloReal half_phi = CycloReal::phi(n) * CycloReal::rational(n, mpq_class(1, 2));
    CycloReal t0 = CycloReal::one(n), t1 = half_phi;
    if (m == 0) return t0;
    for (long i = 1; i < m; ++i) {
        CycloReal t2 = CycloReal::phi(n) * t1 - t0;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return t1;
}

Enclosure enclose(const CycloReal& a, int bits) {
    MpfrVar lo(bits), hi(bits), den_lo(bits), den_hi(bits);
    enclose_numerator(a, bits, lo.v, hi.v);
    mpfr_div_z(lo.v, lo.v, a.denominator().get_mpz_t(), MPFR_RNDD);
    mpfr_div_z(hi.v, hi.v, a.denominator().get_mpz_t(), MPFR_RNDU);
    return Enclosure{mpfr_get_d(lo.v, MPFR_RNDD), mpfr_get_d(hi.v, MPFR_RNDU)};
}

int ladder_bits(int step) { return (1 << (step + 6)) - 11 - 4 * step; }

int ladder_start_bits() { return env_precision(); }

std::vector<int> embedding_indices(int n) {
    std::vector<int> out;
    for (int j = 1; j < n; j += 2)
        if (std::gcd(j, n) == 1) out.push_back(j);
    return out;
}

double embed(const CycloReal& a, int j) {
    const long double x = 2.0L * std::cos(3.14159265358979323846264338327950288L * j / a.n());
    long double s = 0.0L;
    const auto cs = a.coeffs();
    for (size_t i = cs.size(); i-- > 0;) s = s * x + static_cast<long double>(cs[i].get_d());
    return static_cast<double>(s);
}

}  // namespace kvol
