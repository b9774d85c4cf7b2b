#include "doctest.h"

#include "kvol/hyperbolic.hpp"
#include "kvol/surface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace kvol;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::array<double, 4> random_sl2(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    for (;;) {
        std::array<double, 4> m{u(rng), u(rng), u(rng), u(rng)};
        double det = m[0] * m[3] - m[1] * m[2];
        if (det < 0.05) continue;
        double s = std::sqrt(det);
        for (double& x : m) x /= s;
        return m;
    }
}

std::array<double, 4> mul(const std::array<double, 4>& x, const std::array<double, 4>& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

bool close(HPoint a, HPoint b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

HPoint x_n_point(int n) {
    Mat2 m = conversion_matrix(n).inverse();
    auto d = m.to_double();
    double s = std::sqrt(d[0] * d[3] - d[1] * d[2]);
    for (double& x : d) x /= s;
    return point_of_surface(d);
}

}  // namespace

TEST_CASE("point of a surface") {
    CHECK(close(point_of_surface(Mat2::identity(8)), {0, 1}, 1e-15));
    for (int n : {8, 10, 12, 16}) {
        HPoint z = x_n_point(n);
        CHECK(z.real() == doctest::Approx(std::cos(M_PI / n)).epsilon(1e-12));
        CHECK(z.imag() == doctest::Approx(std::sin(M_PI / n)).epsilon(1e-12));
        // the same point from the exact matrix (scale invariance)
        CHECK(close(point_of_surface(conversion_matrix(n).inverse()), z, 1e-12));
    }
    double phi = 2 * std::cos(M_PI / 8);
    CHECK(close(point_of_surface(veech_generators(8).T_H), {phi, 1}, 1e-14));
    CHECK_THROWS_AS(point_of_surface(std::array<double, 4>{1, 0, 0, -1}), std::domain_error);
    CHECK_THROWS_AS(point_of_surface(std::array<double, 4>{1, 1, 1, 1}), std::domain_error);
}

TEST_CASE("right multiplication induces the conjugated action") {
    std::mt19937 rng(3);
    for (int n : {8, 10, 12}) {
        VeechGenerators g = veech_generators(n);
        std::vector<Mat2> gens{g.T_H, g.T_H.inverse(), g.T_V, g.T_V.inverse(), g.R};
        for (int t = 0; t < 50; ++t) {
            auto m = random_sl2(rng);
            HPoint z = point_of_surface(m);
            for (const Mat2& h : gens) {
                HPoint lhs = point_of_surface(mul(m, h.to_double()), true);
                HPoint rhs = induced_action(h)(z);
                CHECK(close(lhs, rhs, 1e-12));
            }
        }
    }
}

TEST_CASE("distance to a geodesic") {
    CHECK(dist_point_geodesic({0, 1}, HGeodesic::vertical(0)) == doctest::Approx(0).epsilon(1e-15));
    CHECK(dist_point_geodesic({1, 1}, HGeodesic::vertical(0)) == doctest::Approx(std::asinh(1.0)));
    double phi = 2 * std::cos(M_PI / 8);
    CHECK(dist_point_geodesic(x_n_point(8), HGeodesic::vertical(1 / phi)) ==
          doctest::Approx(std::asinh(1.0)).epsilon(1e-12));
    // circle geodesics against the two point formula: the foot of the perpendicular from i t
    for (double t : {0.3, 0.9, 2.0, 5.0}) {
        HGeodesic unit = HGeodesic::between(-1, 1);
        CHECK(dist_point_geodesic({0, t}, unit) == doctest::Approx(std::fabs(std::log(t))).epsilon(1e-12));
    }
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3, 3), v(0.1, 3);
    for (int k = 0; k < 200; ++k) {
        // dist to a geodesic is the minimum over sampled points of it, up to sampling error
        double p = u(rng), q = u(rng);
        if (std::fabs(p - q) < 0.1) continue;
        HPoint z{u(rng), v(rng)};
        HGeodesic g = HGeodesic::between(p, q);
        double c = (p + q) / 2, r = std::fabs(p - q) / 2, best = 1e300;
        for (int i = 1; i < 20000; ++i) {
            double th = M_PI * i / 20000;
            best = std::min(best, dist_points(z, {c + r * std::cos(th), r * std::sin(th)}));
        }
        double d = dist_point_geodesic(z, g);
        CHECK(d <= best + 1e-12);
        CHECK(d >= best - 1e-3);
    }
}

TEST_CASE("angle and distance identity") {
    CHECK(angle_between_directions(Mat2::identity(8), CoSlope::inf(), CoSlope::of(CycloReal::zero(8))) == 1.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int k = 0; k < 300; ++k) {
        auto m = random_sl2(rng);
        double d = k % 5 == 0 ? kInf : u(rng), e = u(rng);
        if (d == e) continue;
        double s = angle_between_directions(m, d, e);
        double dist = dist_point_geodesic(point_of_surface(m), HGeodesic::of_directions(d, e));
        CHECK(s * std::cosh(dist) == doctest::Approx(1).epsilon(1e-9));
    }
    // near-degenerate angles
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        std::array<double, 4> id{1, 0, 0, 1};
        double d = 0.7, e = 0.7 + eps;
        auto m = random_sl2(rng);
        for (auto mm : {id, m}) {
            double s = angle_between_directions(mm, d, e);
            double dist = dist_point_geodesic(point_of_surface(mm), HGeodesic::of_directions(d, e));
            CHECK(s * std::cosh(dist) == doctest::Approx(1).epsilon(1e-9));
        }
    }
    // octagon: horizontal side and the side of co-slope -1/Phi meet at pi/4
    const int n = 8;
    Mat2 p = conversion_matrix(n).inverse();
    CycloReal phi = CycloReal::phi(n);
    double s = angle_between_directions(p, CoSlope::inf(), CoSlope::of(-phi.inverse()));
    CHECK(s == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("equal angle means equal distance") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 100; ++k) {
        double d = u(rng), e = u(rng);
        if (std::fabs(d - e) < 0.05) continue;
        HGeodesic g = HGeodesic::of_directions(d, e);
        auto m1 = random_sl2(rng), m2 = random_sl2(rng);
        double s1 = angle_between_directions(m1, d, e), s2 = angle_between_directions(m2, d, e);
        double r1 = dist_point_geodesic(point_of_surface(m1), g), r2 = dist_point_geodesic(point_of_surface(m2), g);
        CHECK(std::cosh(r1) == doctest::Approx(1 / s1).epsilon(1e-9));
        if (std::fabs(s1 - s2) < 1e-12) CHECK(r1 == doctest::Approx(r2));
        CHECK((s1 < s2) == (r1 > r2));
    }
}

TEST_CASE("fundamental domain and reduction") {
    for (int n : {8, 10, 12}) {
        FundDomain dom(n);
        CHECK(dom.contains({0, 1}));
        CHECK(dom.contains(x_n_point(n)));
        double phi = dom.phi;
        Reduction r0 = reduce_to_fundamental_domain(n, {0, 1});
        CHECK(r0.word.empty());
        Reduction r1 = reduce_to_fundamental_domain(n, {phi, 1});
        CHECK(close(r1.point, {0, 1}, 1e-12));
        REQUIRE(r1.word.size() == 1);
        CHECK(r1.word[0] == Gen::THinv);
        std::mt19937 rng(17 + n);
        std::uniform_int_distribution<int> g(0, 3), len(1, 30);
        for (int t = 0; t < 1000; ++t) {
            std::vector<Gen> w;
            int l = len(rng);
            for (int i = 0; i < l; ++i) w.push_back(static_cast<Gen>(g(rng)));
            Reduction r = reduce_word_image(n, w, {0, 1});
            CHECK(r.converged);
            CHECK(dom.contains(r.point));
            CHECK(close(r.point, {0, 1}, 1e-9));
            // the double path still lands in the domain
            Reduction rd = reduce_to_fundamental_domain(n, apply_word(n, w, {0, 1}));
            CHECK(rd.converged);
            CHECK(dom.contains(rd.point));
        }
    }
}

TEST_CASE("distance to the maximal geodesics") {
    const int n = 8;
    double phi = 2 * std::cos(M_PI / n);
    GmaxDistance a = dist_to_Gmax(n, {0, 1});
    CHECK(a.distance == doctest::Approx(0).epsilon(1e-12));
    CHECK(a.converged);
    GmaxDistance b = dist_to_Gmax(n, {1 / phi, 0.37});
    CHECK(b.distance == doctest::Approx(0).epsilon(1e-12));
    GmaxDistance c = dist_to_Gmax(n, x_n_point(n));
    CHECK(c.distance == doctest::Approx(std::asinh(1.0)).epsilon(1e-9));
    CHECK(c.nearest_k == 1);
    CHECK(c.converged);
    // invariance under the group
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> ux(-phi / 2, phi / 2), uy(0.3, 2);
    std::uniform_int_distribution<int> g(0, 3), len(1, 10);
    for (int t = 0; t < 20; ++t) {
        HPoint z{ux(rng), uy(rng)};
        std::vector<Gen> w;
        int l = len(rng);
        for (int i = 0; i < l; ++i) w.push_back(static_cast<Gen>(g(rng)));
        double d0 = dist_to_Gmax(n, z, 12, 6).distance;
        const HPoint z1 = apply_word(n, w, z);
        GmaxDistance g1 = dist_to_Gmax(n, z1, 12, 6);
        CHECK(d0 == doctest::Approx(g1.distance).epsilon(1e-9));
        // the reported member is at that distance, in the coordinates of z1
        CHECK(dist_point_geodesic(z1, g1.nearest) == doctest::Approx(g1.distance).epsilon(1e-8));
    }
    CHECK_THROWS_AS(dist_to_Gmax(n, {0, 1}, 0, 1), std::invalid_argument);
}

TEST_CASE("distance to the maximal geodesics against a plain word search") {
    // every word of length <= 5 applied to the reduced point, no deduplication;
    // members listed explicitly up to k = 20000
    for (int n : {8, 10, 12}) {
        const int W = 5;
        double phi = 2 * std::cos(M_PI / n);
        std::vector<double> lines{0};
        for (int k = 1; k <= 20000; ++k) {
            lines.push_back(1 / (k * phi));
            lines.push_back(-1 / (k * phi));
        }
        std::sort(lines.begin(), lines.end());
        auto nearest = [&](HPoint w) {
            auto it = std::lower_bound(lines.begin(), lines.end(), w.real());
            double dx = 1e300;
            if (it != lines.end()) dx = std::min(dx, *it - w.real());
            if (it != lines.begin()) dx = std::min(dx, w.real() - *std::prev(it));
            return std::asinh(dx / w.imag());
        };
        std::mt19937 rng(23 + n);
        std::uniform_real_distribution<double> ux(-phi / 2, phi / 2), uy(0.05, 2);
        for (int t = 0; t < 30; ++t) {
            HPoint z{ux(rng), uy(rng)};
            GmaxDistance g = dist_to_Gmax(n, z, 12, W);
            double best = 1e300;
            std::function<void(HPoint, int)> walk = [&](HPoint w, int depth) {
                best = std::min(best, nearest(w));
                if (depth == W) return;
                for (int i = 0; i < 4; ++i) walk(gen_action(n, static_cast<Gen>(i))(w), depth + 1);
            };
            walk(g.reduced, 0);
            CHECK(g.distance == doctest::Approx(best).epsilon(1e-10));
            // the tabulation split does not change the value
            CHECK(dist_to_Gmax(n, z, 3, W).distance == doctest::Approx(g.distance).epsilon(1e-12));
        }
    }
}
