#include "doctest.h"

#include "kvol/intersect.hpp"

#include <numeric>
#include <random>

using namespace kvol;

namespace {

CycloReal q(int n, long a, long b = 1) { return CycloReal::rational(n, mpq_class(a, b)); }

std::vector<SaddleConnection> closed_scs(const TranslationSurface& s, double L) {
    std::vector<SaddleConnection> out;
    for (auto& sc : enumerate_saddle_connections(s, L))
        if (sc.closed()) out.push_back(sc);
    return out;
}

// closed curves made of one closed connection or two connections between distinct singularities
std::vector<ClosedCurve> curves(const TranslationSurface& s, double L, std::size_t max_pairs) {
    auto all = enumerate_saddle_connections(s, L);
    std::vector<ClosedCurve> out;
    std::vector<SaddleConnection> open;
    for (auto& sc : all) {
        if (sc.closed())
            out.push_back(ClosedCurve::of(sc));
        else
            open.push_back(sc);
    }
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < open.size() && pairs < max_pairs; ++i)
        for (std::size_t j = i + 1; j < open.size() && pairs < max_pairs; ++j) {
            SaddleConnection a = open[i], b = open[j];
            if (a.start_class == b.start_class) b = b.reversed(s);
            if (a.end_class != b.start_class || b.end_class != a.start_class) continue;
            out.push_back({{a, b}});
            ++pairs;
        }
    return out;
}

SaddleConnection with_holonomy(const TranslationSurface& s, const std::vector<SaddleConnection>& v, Vec2 h) {
    for (const auto& sc : v) {
        if (sc.holonomy == h) return sc;
        if (sc.holonomy == -h) return sc.reversed(s);
    }
    throw std::runtime_error("no saddle connection with that holonomy");
}

int rank(std::vector<std::vector<long>> m0) {
    std::vector<std::vector<mpq_class>> m;
    for (auto& r : m0) m.emplace_back(r.begin(), r.end());
    int rk = 0;
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && rk < static_cast<int>(m.size()); ++c) {
        std::size_t p = static_cast<std::size_t>(rk);
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[static_cast<std::size_t>(rk)]);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == static_cast<std::size_t>(rk) || m[i][c] == 0) continue;
            mpq_class f = m[i][c] / m[static_cast<std::size_t>(rk)][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[static_cast<std::size_t>(rk)][j];
        }
        ++rk;
    }
    return rk;
}

}  // namespace

TEST_CASE("square torus: determinant formula") {
    TranslationSurface t = build_ngon(4);
    auto v = enumerate_saddle_connections(t, 5.0);
    auto curve = [&](long p, long r) {
        long g = std::gcd(std::labs(p), std::labs(r));
        SaddleConnection sc = with_holonomy(t, v, {q(4, p / g), q(4, r / g)});
        return ClosedCurve{std::vector<SaddleConnection>(static_cast<std::size_t>(g), sc)};
    };
    CHECK(intersection_number(t, curve(1, 0), curve(0, 1)) == 1);
    for (long p = -3; p <= 3; ++p)
        for (long r = -3; r <= 3; ++r) {
            if (!p && !r) continue;
            ClosedCurve g = curve(p, r);
            for (long a = -3; a <= 3; ++a)
                for (long b = -3; b <= 3; ++b) {
                    if (!a && !b) continue;
                    ClosedCurve d = curve(a, b);
                    IntersectionReport rep = intersect(t, g, d);
                    CHECK(rep.total == p * b - r * a);
                    CHECK(rep.total == rep.interior + rep.singular);
                    CHECK(intersect(t, g, d, Perturbation::Right).total == rep.total);
                }
        }
}

TEST_CASE("torus homology and form") {
    TranslationSurface t = build_ngon(4);
    auto v = enumerate_saddle_connections(t, 5.0);
    int ph = t.edge_pair({0, 0}).first, pv = t.edge_pair({0, 1}).first;
    int sh = t.edge_pair({0, 0}).second, sv = t.edge_pair({0, 1}).second;
    for (long p = -3; p <= 3; ++p)
        for (long r = 1; r <= 3; ++r) {
            if (std::gcd(std::labs(p), r) != 1) continue;
            auto h = homology_class(t, ClosedCurve::of(with_holonomy(t, v, {q(4, p), q(4, r)})));
            CHECK(h[static_cast<std::size_t>(ph)] == sh * p);
            CHECK(h[static_cast<std::size_t>(pv)] == sv * r);
        }
    IntersectionForm f = intersection_form(t);
    REQUIRE(f.matrix.size() == 2);
    CHECK(f.W[static_cast<std::size_t>(ph)][static_cast<std::size_t>(pv)] == sh * sv);
    CHECK(f.W[static_cast<std::size_t>(ph)][static_cast<std::size_t>(ph)] == 0);
    CHECK(determinant(f.matrix) == 1);
}

TEST_CASE("octagon sides meet once at the singularity") {
    TranslationSurface x = build_ngon(8);
    for (int i = 0; i < 4; ++i) {
        ClosedCurve a = ClosedCurve::of(edge_saddle_connection(x, {0, i}));
        auto h = homology_class(x, a);
        for (int k = 0; k < 4; ++k) CHECK(h[static_cast<std::size_t>(k)] == (x.edge_pair({0, i}).first == k ? x.edge_pair({0, i}).second : 0));
        for (int j = 0; j < 4; ++j) {
            ClosedCurve b = ClosedCurve::of(edge_saddle_connection(x, {0, j}));
            IntersectionReport r = intersect(x, a, b);
            if (i == j) {
                CHECK(r.total == 0);
            } else {
                CHECK(std::labs(r.total) == 1);
                CHECK(r.interior == 0);
                CHECK(r.singular == r.total);
            }
        }
    }
    IntersectionForm f = intersection_form(x);
    REQUIRE(f.matrix.size() == 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(f.matrix[i][j] == -f.matrix[j][i]);
            if (i != j) CHECK(std::labs(f.matrix[i][j]) == 1);
        }
    CHECK(determinant(f.matrix) == 1);
}

TEST_CASE("geometric count agrees with the homology form") {
    struct Case {
        TranslationSurface s;
        double L;
    };
    std::vector<Case> cases = {{build_ngon(8), 3.0}, {build_ngon(10), 2.6}, {build_ngon(12), 2.6},
                               {build_staircase(8), 2.5}, {build_staircase(10), 2.5}, {build_staircase(14), 2.0}};
    for (auto& c : cases) {
        IntersectionForm f = intersection_form(c.s);
        auto cs = curves(c.s, c.L, 40);
        REQUIRE(cs.size() > 3);
        std::vector<std::vector<long>> hs;
        for (auto& g : cs) hs.push_back(homology_class(c.s, g));
        long nonzero = 0;
        for (std::size_t i = 0; i < cs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j) {
                long t = intersection_number(c.s, cs[i], cs[j]);
                CHECK(t == f.evaluate(hs[i], hs[j]));
                nonzero += t != 0;
            }
        CHECK(nonzero > 0);
    }
}

TEST_CASE("non-degenerate form on the one-vertex n-gons") {
    for (int n : {8, 12, 16}) {
        IntersectionForm f = intersection_form(build_ngon(n));
        CHECK(static_cast<int>(f.matrix.size()) == n / 2);
        CHECK(determinant(f.matrix) != 0);
        // several faces: the edge pairs over-span homology, the rank is still 2g
        TranslationSurface st = build_staircase(n);
        IntersectionForm g = intersection_form(st);
        CHECK(rank(g.matrix) == 2 * st.genus());
    }
}

TEST_CASE("antisymmetry and perturbation independence on random pairs") {
    std::mt19937 rng(7);
    for (int n : {8, 12, 10}) {
        TranslationSurface x = build_ngon(n);
        auto cs = curves(x, 3.2, 60);
        std::uniform_int_distribution<std::size_t> pick(0, cs.size() - 1);
        for (int k = 0; k < 200; ++k) {
            const ClosedCurve& a = cs[pick(rng)];
            const ClosedCurve& b = cs[pick(rng)];
            long ab = intersection_number(x, a, b);
            CHECK(ab == -intersection_number(x, b, a));
            CHECK(intersect(x, a, b, Perturbation::Right).total == ab);
        }
    }
}

TEST_CASE("a curve has zero intersection with itself and with parallel curves") {
    for (int n : {8, 10, 12}) {
        TranslationSurface s = build_staircase(n);
        auto v = closed_scs(s, 4.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(intersection_number(s, ClosedCurve::of(v[i]), ClosedCurve::of(v[i])) == 0);
            for (std::size_t j = i + 1; j < v.size(); ++j)
                if (parallel(v[i].holonomy, v[j].holonomy))
                    CHECK(intersection_number(s, ClosedCurve::of(v[i]), ClosedCurve::of(v[j])) == 0);
        }
    }
}

TEST_CASE("winding around the small vertical cylinder") {
    // the connection (l_m, j h_m) inside C_m meets alpha_m j - 1 times inside and once at the singularity
    for (int n : {8, 12}) {
        TranslationSurface s = build_staircase(n);
        const int m = n / 4;
        CycloReal lm = staircase_lengths(n).l_m, hm = CycloReal::phi(n) * lm;
        ClosedCurve alpha = ClosedCurve::of(edge_saddle_connection(s, {m - 1, 0}));
        CHECK(alpha.components[0].holonomy == Vec2{lm, q(n, 0)});
        auto v = enumerate_saddle_connections(s, 12.0 * lm.to_double());
        for (long j = 1; j <= 6; ++j) {
            bool found = false;
            for (const auto& sc : v) {
                if (!(sc.holonomy == Vec2{lm, q(n, j) * hm})) continue;
                bool inside = std::all_of(sc.faces.begin(), sc.faces.end(), [&](int f) { return f == m - 1; });
                if (!inside) continue;
                found = true;
                IntersectionReport r = intersect(s, alpha, ClosedCurve::of(sc));
                CHECK(r.total == j);
                CHECK(r.interior == j - 1);
                CHECK(r.singular == 1);
            }
            CHECK(found);
        }
    }
}

TEST_CASE("invalid curves") {
    TranslationSurface x = build_ngon(10);
    auto v = enumerate_saddle_connections(x, 1.0);
    REQUIRE(!v.empty());
    REQUIRE(!v[0].closed());
    CHECK_THROWS_AS(ClosedCurve::of(v[0]).validate(), std::invalid_argument);
}
