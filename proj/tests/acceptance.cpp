// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "kvol/kvol.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace kvol;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

CycloReal q(int n, long a, long b = 1) { return CycloReal::rational(n, mpq_class(a, b)); }

double lm_of(int n) { return staircase_lengths(n).l_m.to_double(); }

// exact matrix with point x + i s^2
Mat2 upper(int n, const CycloReal& x, const mpq_class& s) {
    const CycloReal si = CycloReal::rational(n, 1 / s);
    return {si, x * si, q(n, 0), CycloReal::rational(n, s)};
}

struct Result {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// witnesses of an n-gon run are exactly the pairs of sides in distinct directions
void check_side_witnesses(Result& r, const KvolReport& k, int n) {
    std::set<std::pair<std::string, std::string>> seen;
    for (auto& [a, b] : k.witnesses) {
        const bool sides = a.components.size() == 1 && b.components.size() == 1 &&
                           a.components[0].length_sq == q(n, 1) && b.components[0].length_sq == q(n, 1);
        r.require(sides, "witness is not a pair of sides");
        if (!sides) continue;
        r.require(!parallel(a.components[0].holonomy, b.components[0].holonomy), "parallel witness");
        auto key = [](const Vec2& v) {
            Vec2 c = canonical(v);
            return c.x.to_string() + "," + c.y.to_string();
        };
        auto ka = key(a.components[0].holonomy), kb = key(b.components[0].holonomy);
        seen.insert(std::minmax(ka, kb));
    }
    const std::size_t dirs = static_cast<std::size_t>(n / 2);
    r.require(seen.size() == k.witnesses.size(), "repeated witness");
    r.require(seen.size() == dirs * (dirs - 1) / 2, "not every pair of side directions");
}

Result c1_c2(int n, double expected, double limit_s) {
    Result r;
    auto t = Clock::now();
    KvolReport k = kvol_bruteforce(conversion_matrix(n).inverse(), n, 3.0);
    const double el = seconds_since(t);
    r.require(k.exact_ratio_sq && *k.exact_ratio_sq == q(n, 1), "max ratio is not exactly 1/l0^2");
    check_side_witnesses(r, k, n);
    r.require(std::fabs(k.value - expected) <= 1e-9, "value");
    r.require(el <= limit_s, "runtime");
    r.detail << "value " << k.value << ", " << k.witnesses.size() << " witnesses, " << el << " s";
    return r;
}

Result c3() {
    Result r;
    for (int n : {8, 12}) {
        TranslationSurface s = build_staircase(n);
        const CycloReal lm = staircase_lengths(n).l_m, phi = CycloReal::phi(n);
        auto conns = enumerate_saddle_connections(s, 8 * lm.to_double());
        IntersectionForm form = intersection_form(s);
        const CycloReal top = (phi * lm * lm).inverse();
        for (long k : {1, 2, 3, 0}) {
            CoSlope d = CoSlope::of(k ? (q(n, k) * phi).inverse() : q(n, 0));
            r.require(K_of_directions(s, form, conns, CoSlope::inf(), d).value == top,
                      "n=" + std::to_string(n) + " k=" + (k ? std::to_string(k) : "inf"));
        }
        const CycloReal c = phi.pow(3) - q(n, 2) * phi;
        CycloReal v = K_of_directions(s, form, conns, CoSlope::inf(), CoSlope::of((phi * phi - q(n, 1)) * c.inverse())).value;
        r.require(v == (c * lm * lm).inverse(), "n=" + std::to_string(n) + " third pair");
    }
    r.detail << "S_8 and S_12 at L = 8 l_m";
    return r;
}

Result c4() {
    Result r;
    const int n = 8;
    auto t = Clock::now();
    const double L = 30 * lm_of(n);
    FundDomain dom(n);
    std::mt19937 rng(7);
    const int xr = static_cast<int>(std::floor(dom.phi / 2 * 1000));
    std::uniform_int_distribution<int> ux(-xr, xr), us(150, 1500);
    double worst = 0;
    for (int done = 0; done < 20;) {
        mpq_class x(ux(rng), 1000), s(us(rng), 1000);
        x.canonicalize();
        s.canonicalize();
        HPoint z{x.get_d(), mpq_class(s * s).get_d()};
        if (!dom.contains(z, 0)) continue;
        ++done;
        KvolReport cf = kvol_closed_formula(n, z);
        KvolReport bf = kvol_bruteforce(upper(n, CycloReal::rational(n, x), s), n, L);
        r.require(cf.converged, "formula not converged");
        r.require(bf.value <= cf.value + 1e-9, "brute force above the formula");
        const double gap = (cf.value - bf.value) / cf.value;
        r.require(gap <= 0.02, "gap above 2%");
        worst = std::max(worst, gap);
    }
    // on the maximal geodesics x = -1/Phi and x = 0 the value K0 is attained
    const CycloReal K0 = kvol_K0(n);
    const CycloReal phi = CycloReal::phi(n);
    double worst_line = 0;
    for (const CycloReal& x : {-phi.inverse(), q(n, 0)})
        for (long s10 : {9, 10, 11, 13, 16}) {
            KvolReport bf = kvol_bruteforce(upper(n, x, mpq_class(s10, 10)), n, L);
            worst_line = std::max(worst_line, std::fabs(bf.value - K0.to_double()));
            r.require(std::fabs(bf.value - K0.to_double()) <= 1e-9, "K0 not attained on a maximal geodesic");
            r.require(!bf.exact_value_sq || *bf.exact_value_sq == K0 * K0, "exact value differs from K0");
        }
    const double el = seconds_since(t);
    r.require(el <= 600, "runtime");
    r.detail << "max relative gap " << worst << ", max |bf - K0| on lines " << worst_line << ", " << el << " s";
    return r;
}

std::array<double, 4> random_sl2(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    for (;;) {
        std::array<double, 4> m{u(rng), u(rng), u(rng), u(rng)};
        double det = m[0] * m[3] - m[1] * m[2];
        if (det < 0.05) continue;
        double s = std::sqrt(det);
        for (double& v : m) v /= s;
        return m;
    }
}

Result c5() {
    Result r;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-4, 4);
    double worst = 0;
    for (int k = 0; k < 100;) {
        auto m = random_sl2(rng);
        double d = k % 10 == 0 ? std::numeric_limits<double>::infinity() : u(rng), e = u(rng);
        if (std::fabs(d - e) < 1e-3) continue;
        ++k;
        double s = angle_between_directions(m, d, e);
        double dist = dist_point_geodesic(point_of_surface(m), HGeodesic::of_directions(d, e));
        worst = std::max(worst, std::fabs(s * std::cosh(dist) - 1));
    }
    r.require(worst < 1e-9, "identity");
    const int n = 8;
    const Mat2 P = conversion_matrix(n).inverse();
    const CoSlope side = CoSlope::of(-CycloReal::phi(n).inverse());
    const double s = angle_between_directions(P, CoSlope::inf(), side);
    const double ch = std::cosh(dist_point_geodesic(point_of_surface(P), HGeodesic::of_directions(CoSlope::inf(), side)));
    r.require(std::fabs(s - 1 / std::sqrt(2.0)) < 1e-12, "X_8 angle");
    r.require(std::fabs(ch - std::sqrt(2.0)) < 1e-9, "X_8 cosh");
    r.detail << "max |sin cosh - 1| " << worst << ", X_8: sin " << s << " cosh " << ch;
    return r;
}

Result c6() {
    Result r;
    // square torus
    TranslationSurface t = build_ngon(4);
    auto tv = enumerate_saddle_connections(t, 5.0);
    auto curve = [&](long a, long b) {
        long g = std::gcd(std::labs(a), std::labs(b));
        Vec2 h{q(4, a / g), q(4, b / g)};
        for (const auto& sc : tv) {
            if (sc.holonomy == h) return ClosedCurve{std::vector<SaddleConnection>(static_cast<std::size_t>(g), sc)};
            if (sc.holonomy == -h)
                return ClosedCurve{std::vector<SaddleConnection>(static_cast<std::size_t>(g), sc.reversed(t))};
        }
        throw std::runtime_error("torus connection missing");
    };
    std::size_t torus_pairs = 0;
    for (long a = -3; a <= 3; ++a)
        for (long b = -3; b <= 3; ++b) {
            if (!a && !b) continue;
            ClosedCurve g = curve(a, b);
            for (long c = -3; c <= 3; ++c)
                for (long d = -3; d <= 3; ++d) {
                    if (!c && !d) continue;
                    ++torus_pairs;
                    ClosedCurve h = curve(c, d);
                    long v = intersect(t, g, h).total;
                    r.require(v == a * d - b * c, "torus determinant");
                    r.require(intersect(t, g, h, Perturbation::Right).total == v, "torus perturbation");
                }
        }
    r.detail << torus_pairs << " torus pairs";
    for (int n : {8, 12}) {
        TranslationSurface x = build_ngon(n);
        CurveSet cs = closed_curves(x, enumerate_saddle_connections(x, 3.0), 3.0);
        IntersectionForm form = intersection_form(x);
        std::size_t pairs = 0, bad = 0, bad_side = 0;
        for (std::size_t i = 0; i < cs.curves.size(); ++i)
            for (std::size_t j = 0; j < cs.curves.size(); ++j) {
                ++pairs;
                long v = intersect(x, cs.curves[i], cs.curves[j]).total;
                if (v != form.evaluate(cs.chains[i], cs.chains[j])) ++bad;
                if (intersect(x, cs.curves[i], cs.curves[j], Perturbation::Right).total != v) ++bad_side;
            }
        r.require(bad == 0, "X_" + std::to_string(n) + " geometric count differs from the form");
        r.require(bad_side == 0, "X_" + std::to_string(n) + " perturbation side matters");
        r.detail << ", X_" << n << ": " << pairs << " ordered pairs";
    }
    return r;
}

Result c7() {
    Result r;
    for (int n : {10, 14}) {
        const std::string tag = "n=" + std::to_string(n) + " ";
        TranslationSurface s = build_staircase(n);
        for (const CoSlope& d : {CoSlope::inf(), CoSlope::of(q(n, 0))}) {
            ParallelReport p = check_parallel_criterion(s, d);
            r.require(p.pass && p.max_abs == 0, tag + "parallel " + d.to_string());
        }
        NgonBoundReport b = verify_ngon_bound(n, 3.0);
        r.require(b.pass && b.equalities.empty() && b.violations == 0 && b.undecided == 0, tag + "strictness");
        const double L = 5 * lm_of(n);
        for (const Mat2& M : {Mat2::identity(n), veech_generators(n).T_V}) {
            BoundReport br = bound_4m2(n, M, L);
            r.require(br.pass && br.violations == 0 && br.undecided == 0, tag + "upper bound");
        }
        r.detail << tag << "ok; ";
    }
    ConjectureReport c = explore_conjecture(10, 2.0);
    r.require(c.double_pair_found, "two-side pair meeting twice not found");
    r.require(c.equals_half && c.double_pair_is_best, "best decagon ratio is not 1/(2 l0^2)");
    r.detail << "decagon best ratio " << c.best_ratio;
    return r;
}

Result c8() {
    Result r;
    const int n = 8;
    FundDomain dom(n);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> ux(-dom.phi / 2, dom.phi / 2), uy(0.4, 2.5);
    std::uniform_int_distribution<int> g(0, 3), len30(1, 30), len10(1, 10);
    std::vector<HPoint> base;
    while (base.size() < 10) {
        HPoint z{ux(rng), uy(rng)};
        // interior: away from the boundary
        if (dom.contains(z, 0) && std::fabs(std::fabs(z.real()) - dom.phi / 2) > 1e-3 &&
            std::abs(z - 1 / dom.phi) > 1 / dom.phi + 1e-3 && std::abs(z + 1 / dom.phi) > 1 / dom.phi + 1e-3)
            base.push_back(z);
    }
    auto word = [&](int l) {
        std::vector<Gen> w;
        for (int i = 0; i < l; ++i) w.push_back(static_cast<Gen>(g(rng)));
        return w;
    };
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<Gen> w = word(len30(rng));
        for (HPoint z : base) {
            Reduction red = reduce_word_image(n, w, z);
            r.require(red.converged, "reduction did not converge");
            worst = std::max(worst, std::abs(red.point - z));
        }
    }
    r.require(worst <= 1e-9, "round trip");
    double worst_d = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<Gen> w = word(len10(rng));
        for (HPoint z : base) {
            double d0 = dist_to_Gmax(n, z).distance;
            double d1 = dist_to_Gmax(n, apply_word(n, w, z)).distance;
            worst_d = std::max(worst_d, std::fabs(d0 - d1));
        }
    }
    r.require(worst_d <= 1e-9, "distance invariance");
    r.detail << "10000 round trips, max error " << worst << "; 1000 invariance checks, max " << worst_d;
    return r;
}

Result c9() {
    Result r;
    for (int n : {8, 10, 12, 14}) {
        TranslationSurface s = build_staircase(n);
        const CycloReal phi = CycloReal::phi(n), half = phi * q(n, 1, 2);
        for (bool horizontal : {true, false}) {
            CylinderDecomposition cd = cylinder_decomposition(s, horizontal ? CoSlope::inf() : CoSlope::of(q(n, 0)));
            int halves = 0;
            for (const Cylinder& c : cd.cylinders) {
                r.require(c.modulus == phi || c.modulus == half, "modulus outside {Phi, Phi/2}");
                halves += c.modulus == half;
            }
            const bool exceptional = (n % 4 == 0) == horizontal;
            r.require(halves == (exceptional ? 1 : 0), "n=" + std::to_string(n) + " exceptional side");
            r.detail << "S_" << n << (horizontal ? " H " : " V ") << cd.cylinders.size() << " cyl; ";
        }
    }
    return r;
}

// closed rectangle meets the geodesic
bool meets(const GridCell& c, const HGeodesic& g) {
    if (g.is_vertical()) {
        const double a = g.p_inf ? g.q : g.p;
        return c.x0 <= a && a <= c.x1 && c.y1 > 0;
    }
    const double m = (g.p + g.q) / 2, rad = std::fabs(g.p - g.q) / 2;
    const double nx = std::clamp(m, c.x0, c.x1), ny = std::clamp(0.0, c.y0, c.y1);
    const double dmin = std::hypot(nx - m, ny);
    const double dmax = std::hypot(std::max(std::fabs(c.x0 - m), std::fabs(c.x1 - m)), c.y1);
    return dmin <= rad && rad <= dmax;
}

Result c10() {
    Result r;
    const int n = 8;
    GridSpec spec;
    spec.resolution = 60;
    std::vector<GridCell> cells = kvol_grid(n, spec);
    r.require(!cells.empty(), "empty grid");
    const GridCell* lo = &cells[0];
    double hi = 0;
    for (const GridCell& c : cells) {
        r.require(c.converged, "cell not converged");
        if (c.value < lo->value) lo = &c;
        hi = std::max(hi, c.value);
    }
    const double x8 = std::cos(M_PI / 8), y8 = std::sin(M_PI / 8);
    r.require(lo->x0 <= x8 && x8 <= lo->x1 && lo->y0 <= y8 && y8 <= lo->y1, "minimum cell misses X_8");
    std::size_t maxima = 0;
    for (const GridCell& c : cells)
        if (c.value >= hi - 1e-12 * hi) {
            ++maxima;
            r.require(meets(c, c.nearest), "maximal cell off the orbit of G_max");
        }
    r.detail << cells.size() << " cells, min " << lo->value << " at (" << lo->x << ", " << lo->y << "), max " << hi
             << " on " << maxima << " cell(s)";
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Result()>>> criteria = {
        {1, [] { return c1_c2(8, 2 / std::tan(M_PI / 8), 60); }},
        {2, [] { return c1_c2(12, 6 + 3 * std::sqrt(3.0), 300); }},
        {3, c3},
        {4, c4},
        {5, c5},
        {6, c6},
        {7, c7},
        {8, c8},
        {9, c9},
        {10, c10},
    };
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        auto t = Clock::now();
        Result r;
        try {
            r = run();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << "exception: " << e.what();
        }
        if (!r.pass) ++failed;
        std::printf("criterion %d: %s (%.1f s) %s\n", id, r.pass ? "PASS" : "FAIL", seconds_since(t),
                    r.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
