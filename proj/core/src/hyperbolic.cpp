#include "kvol/hyperbolic.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_set>
#include <stdexcept>
#include <tuple>

namespace kvol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_of(int n) { return 2 * std::cos(M_PI / n); }

}  // namespace

HGeodesic HGeodesic::of_directions(double d, double e) {
    // with z = (di+b)/(ci+a) and co-slope x/y, the orthogonality locus ends at -d, -d'
    bool di = std::isinf(d), ei = std::isinf(e);
    if (di && ei) throw std::invalid_argument("directions must differ");
    if (!di && !ei && d == e) throw std::invalid_argument("directions must differ");
    HGeodesic g;
    g.p_inf = di;
    g.q_inf = ei;
    g.p = di ? 0 : -d;
    g.q = ei ? 0 : -e;
    if (g.p_inf) {
        std::swap(g.p, g.q);
        g.p_inf = false;
        g.q_inf = true;
    }
    return g;
}

HGeodesic HGeodesic::of_directions(const CoSlope& d, const CoSlope& e) {
    if (d == e) throw std::invalid_argument("directions must differ");
    return of_directions(d.to_double(), e.to_double());
}

HPoint PointMap::operator()(HPoint z) const {
    if (anti) z = std::conj(z);
    return (a * z + b) / (c * z + d);
}

void PointMap::boundary(double x, bool x_inf, double& y, bool& y_inf) const {
    // conjugation fixes the real line
    double num, den;
    if (x_inf) {
        num = a;
        den = c;
    } else {
        num = a * x + b;
        den = c * x + d;
    }
    if (std::fabs(den) < 1e-300 * std::max(1.0, std::fabs(num))) {
        y_inf = true;
        y = 0;
    } else {
        y_inf = false;
        y = num / den;
    }
}

HGeodesic PointMap::operator()(const HGeodesic& g) const {
    HGeodesic out;
    boundary(g.p, g.p_inf, out.p, out.p_inf);
    boundary(g.q, g.q_inf, out.q, out.q_inf);
    if (out.p_inf) {
        std::swap(out.p, out.q);
        out.p_inf = false;
        out.q_inf = true;
    }
    return out;
}

PointMap PointMap::then(const PointMap& nx) const {
    // nx o this; conjugation commutes with real matrices
    PointMap r;
    r.a = nx.a * a + nx.b * c;
    r.b = nx.a * b + nx.b * d;
    r.c = nx.c * a + nx.d * c;
    r.d = nx.c * b + nx.d * d;
    r.anti = anti != nx.anti;
    double s = std::sqrt(std::fabs(r.a * r.d - r.b * r.c));
    if (s > 0) {
        r.a /= s;
        r.b /= s;
        r.c /= s;
        r.d /= s;
    }
    return r;
}

HPoint point_of_surface(const std::array<double, 4>& m, bool allow_reversing) {
    const double a = m[0], b = m[1], c = m[2], d = m[3];
    double det = a * d - b * c;
    if (det == 0 || !std::isfinite(det)) throw std::domain_error("point_of_surface: singular matrix");
    if (det < 0 && !allow_reversing) throw std::domain_error("point_of_surface: determinant must be positive");
    double den = a * a + c * c;
    return {(a * b + c * d) / den, std::fabs(det) / den};
}

HPoint point_of_surface(const Mat2& m, bool allow_reversing) {
    int s = m.det().sign();
    if (s == 0) throw std::domain_error("point_of_surface: singular matrix");
    if (s < 0 && !allow_reversing) throw std::domain_error("point_of_surface: determinant must be positive");
    return point_of_surface(m.to_double(), allow_reversing);
}

PointMap induced_action(const std::array<double, 4>& g) {
    // S g^-1 S with S = diag(1, -1), up to scale: [[d, b], [c, a]]
    double det = g[0] * g[3] - g[1] * g[2];
    if (det == 0) throw std::domain_error("induced_action: singular matrix");
    double s = std::sqrt(std::fabs(det));
    // for det < 0 this is anti-Moebius with negative determinant, which preserves H
    return PointMap{g[3] / s, g[1] / s, g[2] / s, g[0] / s, det < 0};
}

PointMap induced_action(const Mat2& g) { return induced_action(g.to_double()); }

double dist_points(HPoint z, HPoint w) {
    double num = std::norm(z - w);
    return std::acosh(1 + num / (2 * z.imag() * w.imag()));
}

double dist_point_geodesic(HPoint z, const HGeodesic& g) {
    if (g.is_vertical()) {
        double a = g.p_inf ? g.q : g.p;
        return std::asinh(std::fabs(z.real() - a) / z.imag());
    }
    double c = (g.p + g.q) / 2, r = std::fabs(g.p - g.q) / 2;
    double dx = z.real() - c, y = z.imag();
    // sinh d = | |z - c|^2 - r^2 | / (2 r y), written to avoid cancellation
    double diff = (dx - r) * (dx + r) + y * y;
    return std::asinh(std::fabs(diff) / (2 * r * y));
}

double angle_between_directions(const std::array<double, 4>& m, double d, double e) {
    auto vec = [](double c) { return std::isinf(c) ? std::array<double, 2>{1, 0} : std::array<double, 2>{c, 1}; };
    auto u = vec(d), v = vec(e);
    std::array<double, 2> mu{m[0] * u[0] + m[1] * u[1], m[2] * u[0] + m[3] * u[1]};
    std::array<double, 2> mv{m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
    double w = mu[0] * mv[1] - mu[1] * mv[0];
    return std::fabs(w) / (std::hypot(mu[0], mu[1]) * std::hypot(mv[0], mv[1]));
}

double angle_between_directions(const Mat2& m, const CoSlope& d, const CoSlope& e) {
    return angle_between_directions(m.to_double(), d.to_double(), e.to_double());
}

FundDomain::FundDomain(int n_) : n(n_), phi(phi_of(n_)) {}

bool FundDomain::contains(HPoint z, double tol) const {
    if (z.imag() <= 0) return false;
    if (std::fabs(z.real()) > phi / 2 + tol) return false;
    double r = 1 / phi;
    if (std::abs(z + r) < r - tol) return false;
    if (std::abs(z - r) < r - tol) return false;
    return true;
}

std::string gen_name(Gen g) {
    switch (g) {
        case Gen::TH: return "T_H";
        case Gen::THinv: return "T_H^-1";
        case Gen::TV: return "T_V";
        default: return "T_V^-1";
    }
}

PointMap gen_action(int n, Gen g) {
    const double f = phi_of(n);
    switch (g) {
        case Gen::TH: return induced_action(std::array<double, 4>{1, f, 0, 1});
        case Gen::THinv: return induced_action(std::array<double, 4>{1, -f, 0, 1});
        case Gen::TV: return induced_action(std::array<double, 4>{1, 0, f, 1});
        default: return induced_action(std::array<double, 4>{1, 0, -f, 1});
    }
}

HPoint apply_word(int n, const std::vector<Gen>& word, HPoint z) {
    for (Gen g : word) z = gen_action(n, g)(z);
    return z;
}

namespace {

using Quad = __float128;

// complex numbers over double or quad; std::complex is only specified for the standard types
template <class T>
struct Cx {
    T re, im;
};

template <class T>
Cx<T> mobius(T a, T b, T c, T d, Cx<T> z) {
    // (a z + b) / (c z + d)
    T nr = a * z.re + b, ni = a * z.im, dr = c * z.re + d, di = c * z.im;
    T den = dr * dr + di * di;
    return {(nr * dr + ni * di) / den, (ni * dr - nr * di) / den};
}

inline double absd(double x) { return std::fabs(x); }
inline Quad absd(Quad x) { return x < 0 ? -x : x; }

// strip translation then the two circle maps, repeated; T is double or quad
template <class T>
Reduction reduce_impl(int n, T f, Cx<T> z, int max_steps) {
    const T r = 1 / f;
    const T tol = T(1e-9);
    auto act = [&](Gen g, Cx<T> w) {
        switch (g) {
            case Gen::TH: return mobius<T>(1, f, 0, 1, w);
            case Gen::THinv: return mobius<T>(1, -f, 0, 1, w);
            case Gen::TV: return mobius<T>(1, 0, f, 1, w);
            default: return mobius<T>(1, 0, -f, 1, w);
        }
    };
    auto dist2 = [](Cx<T> w, T c) { return (w.re - c) * (w.re - c) + w.im * w.im; };
    Reduction red;
    int steps = 0;
    while (steps < max_steps) {
        long k = std::lround(static_cast<double>(z.re / f));
        if (absd(z.re) > f / 2 + tol && k != 0) {
            Gen g = k > 0 ? Gen::THinv : Gen::TH;
            for (long i = 0; i < std::labs(k); ++i) {
                z = act(g, z);
                red.word.push_back(g);
                ++steps;
            }
            continue;
        }
        if (dist2(z, -r) < (r - tol) * (r - tol)) {
            z = act(Gen::TV, z);
            red.word.push_back(Gen::TV);
            ++steps;
            continue;
        }
        if (dist2(z, r) < (r - tol) * (r - tol)) {
            z = act(Gen::TVinv, z);
            red.word.push_back(Gen::TVinv);
            ++steps;
            continue;
        }
        break;
    }
    red.point = {static_cast<double>(z.re), static_cast<double>(z.im)};
    red.converged = FundDomain(n).contains(red.point, 1e-9);
    return red;
}

Quad phi_quad(int n) { return 2 * cosq(M_PIq / n); }

}  // namespace

Reduction reduce_to_fundamental_domain(int n, HPoint z, int max_steps) {
    if (!(z.imag() > 0)) throw std::domain_error("point not in the upper half plane");
    return reduce_impl<double>(n, phi_of(n), {z.real(), z.imag()}, max_steps);
}

Reduction reduce_word_image(int n, const std::vector<Gen>& word, HPoint base, int max_steps) {
    if (!(base.imag() > 0)) throw std::domain_error("point not in the upper half plane");
    const Quad f = phi_quad(n);
    Cx<Quad> z{base.real(), base.imag()};
    for (Gen g : word) {
        Quad c = g == Gen::TV ? f : (g == Gen::TVinv ? -f : Quad(0));
        Quad b = g == Gen::TH ? f : (g == Gen::THinv ? -f : Quad(0));
        z = mobius<Quad>(1, b, c, 1, z);
    }
    return reduce_impl<Quad>(n, f, z, max_steps);
}

namespace {

struct Key {
    long a, b, c, d;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = std::hash<long>()(k.a);
        for (long v : {k.b, k.c, k.d}) h = h * 1000003u ^ std::hash<long>()(v);
        return h;
    }
};

Key key_of(const PointMap& m) {
    double s = 1;
    // projective sign normalization
    for (double v : {m.a, m.b, m.c, m.d})
        if (std::fabs(v) > 1e-9) {
            s = v > 0 ? 1 : -1;
            break;
        }
    auto q = [&](double v) { return std::lround(s * v * 1e6); };
    return {q(m.a), q(m.b), q(m.c), q(m.d)};
}

// Members of G_max are the vertical lines x = 0 and x = +-1/(k Phi), k >= 1.
// Nearest member with k >= kmin to a point at |Re| = ax, height y.
std::pair<double, double> tail_nearest(double ax, double y, double phi, int kmin) {
    if (ax == 0) return {kInf, 0};
    const double t = 1 / (ax * phi);
    double best = kInf, bk = 0;
    for (double k : {std::floor(t), std::ceil(t)}) {
        k = std::max(k, static_cast<double>(kmin));
        if (!std::isfinite(k)) continue;
        double d = std::asinh(std::fabs(ax - 1 / (k * phi)) / y);
        if (d < best) {
            best = d;
            bk = k;
        }
    }
    return {best, bk};
}

std::pair<double, double> family_nearest(HPoint w, double phi) {
    const double ax = std::fabs(w.real());
    auto t = tail_nearest(ax, w.imag(), phi, 1);
    double d0 = std::asinh(ax / w.imag());
    return d0 <= t.first ? std::make_pair(d0, kInf) : t;
}

PointMap inverse(const PointMap& m) { return {m.d, -m.b, -m.c, m.a, m.anti}; }

// member k on the side of w, pulled back by m
HGeodesic member(const PointMap& m, double k, HPoint w, double phi) {
    const double x = std::isinf(k) ? 0.0 : std::copysign(1 / (k * phi), w.real());
    return inverse(m)(HGeodesic::vertical(x));
}

struct Hit {
    double d = kInf, k = 0;
    HGeodesic g;
};

// Orbit of G_max under words of length <= W. The members k <= K are tabulated
// as geodesics m^-1 gamma (verticals, and circles sorted by radius); the tail
// k > K of each word lies in the strip m^-1 {|x| <= 1/((K+1) Phi)}, which is
// visited only when z can be closer to it than the best so far. None of this
// depends on the query point, so it is built once per (n, K, W).
// Circles below kRadiusFloor are dropped; a query that could still be decided
// by one of them falls back to the word search.
constexpr double kRadiusFloor = 1e-3;

struct Circle {
    double c, r, k;
};

struct Strip {
    PointMap m;
    double hmax;  // height bound of the strip, inf when unbounded
};

struct GeodesicTable {
    double phi = 0, eps = 0;
    int kmin = 1;  // first tail member
    std::vector<std::pair<double, double>> verticals;  // (x, k), sorted by x
    std::vector<Circle> circles;                       // sorted by decreasing radius
    std::vector<Strip> strips;                         // sorted by decreasing height bound

    void finish() {
        std::sort(verticals.begin(), verticals.end());
        std::stable_sort(circles.begin(), circles.end(), [](const Circle& a, const Circle& b) { return a.r > b.r; });
        std::stable_sort(strips.begin(), strips.end(), [](const Strip& a, const Strip& b) { return a.hmax > b.hmax; });
    }

    Hit nearest(HPoint w, bool& decided) const {
        double best = kInf, bk = 0;
        HGeodesic bg;
        auto it = std::lower_bound(verticals.begin(), verticals.end(), std::make_pair(w.real(), -kInf));
        for (auto j : {it, it == verticals.begin() ? it : std::prev(it)}) {
            if (j == verticals.end()) continue;
            double d = std::asinh(std::fabs(w.real() - j->first) / w.imag());
            if (d < best) {
                best = d;
                bk = j->second;
                bg = HGeodesic::vertical(j->first);
            }
        }
        const double y = w.imag();
        // a region below height h is at least log(y / h) away
        auto out_of_reach = [&](double h) { return h < y && std::log(y / h) >= best; };
        for (const Circle& c : circles) {
            if (out_of_reach(c.r)) break;
            HGeodesic g = HGeodesic::between(c.c - c.r, c.c + c.r);
            double d = dist_point_geodesic(w, g);
            if (d < best) {
                best = d;
                bk = c.k;
                bg = g;
            }
        }
        for (const Strip& s : strips) {
            if (out_of_reach(s.hmax)) break;
            HPoint u = s.m(w);
            const double ax = std::fabs(u.real());
            // outside the strip the nearer boundary line bounds every member inside
            if (ax > eps && std::asinh((ax - eps) / u.imag()) >= best) continue;
            auto [d, k] = tail_nearest(ax, u.imag(), phi, kmin);
            if (d < best) {
                best = d;
                bk = k;
                bg = member(s.m, k, u, phi);
            }
        }
        decided = kRadiusFloor < y && std::log(y / kRadiusFloor) >= best;
        return {best, bk, bg};
    }
};

struct GeoKeyHash {
    std::size_t operator()(const std::pair<long, long>& k) const {
        return std::hash<long>()(k.first) * 1000003u ^ std::hash<long>()(k.second);
    }
};

struct TablePair {
    GeodesicTable small, big;
};

// height bound of m^-1 {|x| <= eps}
double strip_height(const PointMap& m, double eps) {
    // unbounded when m^-1 sends a point of [-eps, eps] or infinity to infinity
    if (std::fabs(m.c) < 1e-15) return kInf;
    if (std::fabs(m.a / m.c) <= eps) return kInf;
    PointMap inv = inverse(m);
    double r = 0;
    for (double x : {-eps, eps}) {
        HGeodesic g = inv(HGeodesic::vertical(x));
        if (g.is_vertical()) return kInf;
        r = std::max(r, std::fabs(g.p - g.q) / 2);
    }
    return r;
}

TablePair build_tables(int n, int K, int W) {
    const double f = phi_of(n);
    std::vector<std::pair<double, double>> base{{0.0, kInf}};
    for (int k = 1; k <= K + 2; ++k) {
        base.push_back({1 / (k * f), k});
        base.push_back({-1 / (k * f), k});
    }
    const Gen gens[4] = {Gen::TH, Gen::THinv, Gen::TV, Gen::TVinv};
    PointMap acts[4];
    for (int i = 0; i < 4; ++i) acts[i] = gen_action(n, gens[i]);
    TablePair out;
    out.small.phi = out.big.phi = f;
    out.small.kmin = K + 1;
    out.big.kmin = K + 3;
    out.small.eps = 1 / ((K + 1) * f);
    out.big.eps = 1 / ((K + 3) * f);
    std::unordered_set<std::pair<long, long>, GeoKeyHash> seen_small, seen_big;
    auto add = [&](const PointMap& m, int depth) {
        PointMap inv = inverse(m);
        for (auto [x, k] : base) {
            HGeodesic g = inv(HGeodesic::vertical(x));
            // an endpoint sent far out by rounding is infinity
            if (!g.is_vertical() && std::max(std::fabs(g.p), std::fabs(g.q)) > 1e8) {
                g = HGeodesic::vertical(std::fabs(g.p) < std::fabs(g.q) ? g.p : g.q);
            }
            std::pair<long, long> key;
            Circle c{0, kInf, k};
            if (g.is_vertical()) {
                key = {std::lround(g.p * 1e9), std::numeric_limits<long>::max()};
                c.c = g.p;
            } else {
                double lo = std::min(g.p, g.q), hi = std::max(g.p, g.q);
                c = {(lo + hi) / 2, (hi - lo) / 2, k};
                if (c.r < kRadiusFloor) continue;
                key = {std::lround(lo * 1e9), std::lround(hi * 1e9)};
            }
            auto put = [&](GeodesicTable& t, auto& seen) {
                if (!seen.insert(key).second) return;
                if (std::isinf(c.r))
                    t.verticals.push_back({c.c, c.k});
                else
                    t.circles.push_back(c);
            };
            if (depth <= W && (std::isinf(k) || k <= K)) put(out.small, seen_small);
            put(out.big, seen_big);
        }
        if (depth <= W) out.small.strips.push_back({m, strip_height(m, out.small.eps)});
        out.big.strips.push_back({m, strip_height(m, out.big.eps)});
    };
    // breadth first over words, deduplicated by matrix; dist(z, m^-1 gamma) = dist(m z, gamma)
    std::unordered_set<Key, KeyHash> seen;
    std::vector<PointMap> layer{PointMap{}};
    seen.insert(key_of(layer[0]));
    add(layer[0], 0);
    for (int depth = 1; depth <= W + 2; ++depth) {
        std::vector<PointMap> next;
        next.reserve(layer.size() * 3);
        for (const PointMap& m : layer)
            for (const PointMap& g : acts) {
                PointMap nm = m.then(g);
                if (seen.insert(key_of(nm)).second) {
                    next.push_back(nm);
                    add(nm, depth);
                }
            }
        layer = std::move(next);
    }
    out.small.finish();
    out.big.finish();
    return out;
}

const TablePair& tables(int n, int K, int W) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<TablePair>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, K, W}];
    if (!slot) slot = std::make_unique<TablePair>(build_tables(n, K, W));
    return *slot;
}

// direct search over the images of z, used when a tiny circle could matter
std::pair<Hit, double> word_search(int n, HPoint z0, int W) {
    const double f = phi_of(n);
    const Gen gens[4] = {Gen::TH, Gen::THinv, Gen::TV, Gen::TVinv};
    PointMap acts[4];
    for (int i = 0; i < 4; ++i) acts[i] = gen_action(n, gens[i]);
    std::unordered_set<Key, KeyHash> seen;
    std::vector<PointMap> layer{PointMap{}};
    seen.insert(key_of(layer[0]));
    Hit best;
    double best_big = kInf;
    auto visit = [&](const PointMap& m, int depth) {
        const HPoint u = m(z0);
        auto [d, k] = family_nearest(u, f);
        if (depth <= W && d < best.d) best = {d, k, member(m, k, u, f)};
        best_big = std::min(best_big, d);
    };
    visit(layer[0], 0);
    for (int depth = 1; depth <= W + 2; ++depth) {
        std::vector<PointMap> next;
        next.reserve(layer.size() * 3);
        for (const PointMap& m : layer)
            for (const PointMap& g : acts) {
                PointMap nm = m.then(g);
                if (seen.insert(key_of(nm)).second) {
                    next.push_back(nm);
                    visit(nm, depth);
                }
            }
        layer = std::move(next);
    }
    return {best, best_big};
}

}  // namespace

GmaxDistance dist_to_Gmax(int n, HPoint z, int K_max, int W) {
    if (K_max < 1 || W < 0) throw std::invalid_argument("dist_to_Gmax: K_max >= 1 and W >= 0 required");
    Reduction red = reduce_to_fundamental_domain(n, z);
    const HPoint z0 = red.point;
    const TablePair& t = tables(n, K_max, W);
    bool ok_small = false, ok_big = false;
    Hit best = t.small.nearest(z0, ok_small);
    double best_big = t.big.nearest(z0, ok_big).d;
    if (!ok_small || !ok_big) std::tie(best, best_big) = word_search(n, z0, W);
    PointMap r;  // z0 = r(z)
    for (Gen g : red.word) r = r.then(gen_action(n, g));
    GmaxDistance out;
    out.reduced = z0;
    out.distance = best.d;
    out.nearest_k = best.k;
    out.nearest = inverse(r)(best.g);
    out.converged = red.converged && std::fabs(best.d - best_big) <= 1e-9;
    return out;
}

}  // namespace kvol
