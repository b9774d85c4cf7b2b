#include "doctest.h"

#include "kvol/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace kvol;

namespace {

CycloReal q(int n, long a, long b = 1) { return CycloReal::rational(n, mpq_class(a, b)); }

// count of primitive (p, q) up to sign with p^2 + q^2 <= L^2
long primitive_count(long L) {
    long c = 0;
    for (long x = -L; x <= L; ++x)
        for (long y = 0; y <= L; ++y) {
            if (y == 0 && x <= 0) continue;
            if (x * x + y * y > L * L) continue;
            if (std::gcd(std::labs(x), y) == 1) ++c;
        }
    return c;
}

std::vector<std::array<double, 2>> holonomies(const std::vector<SaddleConnection>& v) {
    std::vector<std::array<double, 2>> out;
    for (const auto& sc : v) out.push_back(sc.hol_d);
    return out;
}

// exact multiset comparison of canonical holonomies
bool same_holonomy_multiset(std::vector<Vec2> a, std::vector<Vec2> b) {
    if (a.size() != b.size()) return false;
    auto lt = [](const Vec2& u, const Vec2& v) {
        int c = compare(u.x, v.x);
        if (c) return c < 0;
        return compare(u.y, v.y) < 0;
    };
    std::sort(a.begin(), a.end(), lt);
    std::sort(b.begin(), b.end(), lt);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

std::vector<Vec2> exact_holonomies(const std::vector<SaddleConnection>& v) {
    std::vector<Vec2> out;
    for (const auto& sc : v) out.push_back(sc.holonomy);
    return out;
}

}  // namespace

TEST_CASE("torus saddle connections are primitive vectors") {
    TranslationSurface t = build_ngon(4);
    CHECK(enumerate_saddle_connections(t, 2.0).size() == 4);
    for (long L = 1; L <= 10; ++L) {
        auto v = enumerate_saddle_connections(t, q(4, L));
        CHECK(static_cast<long>(v.size()) == primitive_count(L));
        for (const auto& sc : v) {
            CHECK(sc.closed());
            CHECK(is_canonical(sc.holonomy));
        }
    }
}

TEST_CASE("octagon: only the sides up to length 1") {
    TranslationSurface x = build_ngon(8);
    auto v = enumerate_saddle_connections(x, q(8, 1));
    REQUIRE(v.size() == 4);
    for (const auto& sc : v) {
        CHECK(sc.length_sq == q(8, 1));
        CHECK(sc.exits.empty());
    }
    // next lengths: short diagonal 2 cos(pi/8) ~ 1.848
    auto w = enumerate_saddle_connections(x, 1.9);
    CHECK(w.size() > 4);
    CHECK(w[4].length == doctest::Approx(2 * std::cos(M_PI / 8)));
}

TEST_CASE("horizontal saddle connections of the n=8 staircase") {
    TranslationSurface s = build_staircase(8);
    StaircaseLengths ls = staircase_lengths(8);
    auto v = enumerate_saddle_connections(s, ls.horizontal[0] * q(8, 3, 2));
    auto h = filter_direction(v, CoSlope::inf());
    std::set<std::string> got;
    std::vector<CycloReal> lens;
    for (const auto& sc : h) {
        CHECK(sc.holonomy.y.is_zero());
        lens.push_back(sc.holonomy.x);
    }
    // alpha_1, alpha_2 and the middle segment of the first column (length l_1)
    CHECK(h.size() == 3);
    for (const auto& x : lens) CHECK((x == ls.horizontal[0] || x == ls.horizontal[1]));
    CHECK(std::count(lens.begin(), lens.end(), ls.horizontal[1]) == 1);
    CHECK(std::count(lens.begin(), lens.end(), ls.horizontal[0]) == 2);
}

TEST_CASE("enumeration agrees with the ray tracer") {
    std::vector<TranslationSurface> surfaces = {build_ngon(10), build_ngon(8), build_staircase(8),
                                                build_staircase(10), build_staircase(12)};
    for (const auto& s : surfaces) {
        auto v = enumerate_saddle_connections(s, 3.5);
        REQUIRE(!v.empty());
        for (const auto& sc : v) {
            Trace t = trace_from_germ(s, sc.start, sc.length * (1 + 1e-9) + 1e-9);
            REQUIRE(t.hit_vertex);
            CHECK(t.holonomy == sc.holonomy);
            CHECK(t.exits == sc.exits);
            CHECK(t.end.corner == sc.end.corner);
            CHECK(s.vertex_class(t.end.corner) == sc.end_class);
            CHECK(sc.crossings(s) == t.crossings);
        }
    }
}

TEST_CASE("no duplicates, sorted, monotone in L") {
    TranslationSurface s = build_staircase(12);
    auto small = enumerate_saddle_connections(s, 2.0);
    auto big = enumerate_saddle_connections(s, 3.0);
    REQUIRE(small.size() < big.size());
    std::set<std::pair<Corner, std::array<double, 2>>> seen;
    for (const auto& sc : big) CHECK(seen.insert({sc.start.corner, sc.hol_d}).second);
    for (std::size_t i = 1; i < big.size(); ++i) CHECK(big[i - 1].length_sq <= big[i].length_sq);
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i].holonomy == big[i].holonomy);
    CHECK(big[small.size()].length > 2.0);
    // reversing twice is the identity
    for (const auto& sc : small) {
        SaddleConnection r = sc.reversed(s).reversed(s);
        CHECK(r.holonomy == sc.holonomy);
        CHECK(r.exits == sc.exits);
        CHECK(r.faces == sc.faces);
    }
}

TEST_CASE("single threaded and threaded runs agree") {
    TranslationSurface s = build_staircase(10);
    auto a = enumerate_saddle_connections(s, 3.0, {1000000, 1});
    auto b = enumerate_saddle_connections(s, 3.0, {1000000, 4});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].holonomy == b[i].holonomy);
        CHECK(a[i].start.corner == b[i].start.corner);
    }
}

TEST_CASE("cap") {
    TranslationSurface s = build_staircase(8);
    CHECK_THROWS_AS(enumerate_saddle_connections(s, 6.0, {10, 2}), EnumerationCapExceeded);
    CHECK_THROWS_AS(enumerate_saddle_connections(s, -1.0), std::invalid_argument);
}

TEST_CASE("linear equivariance") {
    for (int n : {8, 10}) {
        TranslationSurface s = build_staircase(n);
        VeechGenerators g = veech_generators(n);
        Mat2 shear{q(n, 1), q(n, 1, 2), q(n, 0), q(n, 1)};
        for (const Mat2& m : {g.T_H, g.T_V, shear}) {
            TranslationSurface ms = s.transformed(m);
            const double L = 2.5;
            auto direct = enumerate_saddle_connections(ms, L);
            auto md = m.inverse().to_double();
            double opn = std::sqrt(md[0] * md[0] + md[1] * md[1] + md[2] * md[2] + md[3] * md[3]);
            auto base = enumerate_saddle_connections(s, L * opn);
            std::vector<Vec2> mapped;
            CycloReal L2 = q(n, 5, 2) * q(n, 5, 2);
            for (const auto& sc : base) {
                Vec2 h = canonical(transform(m, sc));
                if (norm2(h) <= L2) mapped.push_back(h);
            }
            CHECK(same_holonomy_multiset(mapped, exact_holonomies(direct)));
        }
        // the generators preserve the surface, so the holonomy multiset is preserved
        for (const Mat2& m : {g.T_H, g.T_V}) {
            auto a = enumerate_saddle_connections(s, 2.0);
            auto b = enumerate_saddle_connections(s.transformed(m), 2.0);
            CHECK(same_holonomy_multiset(exact_holonomies(a), exact_holonomies(b)));
        }
    }
}

TEST_CASE("n-gon and staircase have the same holonomies after conversion") {
    for (int n : {8, 10, 12}) {
        TranslationSurface x = build_ngon(n);
        TranslationSurface s = build_staircase(n);
        Mat2 p = conversion_matrix(n);
        TranslationSurface px = x.transformed(p);
        auto a = enumerate_saddle_connections(px, 2.0);
        auto b = enumerate_saddle_connections(s, 2.0);
        CHECK(same_holonomy_multiset(exact_holonomies(a), exact_holonomies(b)));
        CHECK(holonomies(a).size() == holonomies(b).size());
    }
}

TEST_CASE("direction of a saddle connection") {
    const int n = 8;
    TranslationSurface s = build_staircase(n);
    CycloReal phi = CycloReal::phi(n), lm = staircase_lengths(n).l_m;
    auto v = enumerate_saddle_connections(s, 3.0);
    bool found = false;
    for (const auto& sc : v)
        if (sc.holonomy == Vec2{lm, phi * lm}) {
            found = true;
            CHECK(direction_of(sc) == CoSlope::of(phi.inverse()));
        }
    CHECK(found);
    for (const auto& sc : filter_direction(v, CoSlope::inf())) CHECK(direction_of(sc).infinite);
}

TEST_CASE("developed pieces") {
    TranslationSurface s = build_staircase(10);
    for (const auto& sc : enumerate_saddle_connections(s, 3.0)) {
        DevelopedPath p = develop(s, sc);
        REQUIRE(p.pieces.size() == sc.faces.size());
        Vec2 total = Vec2::zero(10);
        for (const auto& pc : p.pieces) total = total + (pc.to - pc.from);
        CHECK(total == sc.holonomy);
        CHECK(p.params.back() == CycloReal::one(10));
        auto d = develop_d(s, sc);
        REQUIRE(d.size() == p.pieces.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            auto to = p.pieces[i].to.to_double();
            CHECK(d[i].to[0] == doctest::Approx(to[0]).epsilon(1e-9));
            CHECK(d[i].to[1] == doctest::Approx(to[1]).epsilon(1e-9));
        }
    }
}

TEST_CASE("subdivision on the n-gon") {
    for (int n : {8, 10, 12}) {
        TranslationSurface x = build_ngon(n);
        auto v = enumerate_saddle_connections(x, 5.0);
        bool saw_sandwiched = false;
        for (const auto& sc : v) {
            auto segs = subdivide(x, sc);
            REQUIRE(!segs.empty());
            CycloReal sum = CycloReal::zero(n);
            for (const auto& sg : segs) sum = sum + (sg.t1 - sg.t0);
            CHECK(sum == CycloReal::one(n));
            if (sc.exits.empty()) {
                CHECK(segs.size() == 1);
                CHECK(segs[0].kind == Segment::Kind::Whole);
            }
            // segments between cuts are at least as long as a side
            for (const auto& sg : segs)
                if (sg.kind == Segment::Kind::Sandwiched || sg.kind == Segment::Kind::NonSandwiched)
                    CHECK(sg.length_sq.to_double() >= 1 - 1e-12);
            for (const auto& sg : segs)
                if (sg.kind == Segment::Kind::Sandwiched) {
                    saw_sandwiched = true;
                    auto d = sector_diagram_for(n, sc.holonomy);
                    CHECK(sg.via_label == d.sandwiched());
                    CHECK(sg.from_label == d.sandwiching());
                    CHECK(sg.to_label == d.sandwiching());
                }
        }
        CHECK(saw_sandwiched);
    }
}
