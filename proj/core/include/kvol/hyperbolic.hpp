#pragma once

#include "kvol/geometry.hpp"

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace kvol {

using HPoint = std::complex<double>;

/// Geodesic of the upper half plane with endpoints p, q in R or infinity.
struct HGeodesic {
    double p = 0, q = 0;
    bool p_inf = false, q_inf = false;

    static HGeodesic vertical(double a) { return {a, 0, false, true}; }
    static HGeodesic between(double a, double b) { return {a, b, false, false}; }
    /// Locus of surfaces M.S_n on which the directions d and d' are orthogonal.
    static HGeodesic of_directions(const CoSlope& d, const CoSlope& e);
    /// Same with float co-slopes, infinity allowed.
    static HGeodesic of_directions(double d, double e);
    bool is_vertical() const { return p_inf || q_inf; }
};

/// Moebius (or anti-Moebius when anti) map z -> (a z + b) / (c z + d).
struct PointMap {
    double a = 1, b = 0, c = 0, d = 1;
    bool anti = false;

    HPoint operator()(HPoint z) const;
    /// Image of a boundary point; inf encoded by the flag.
    void boundary(double x, bool x_inf, double& y, bool& y_inf) const;
    HGeodesic operator()(const HGeodesic& g) const;
    PointMap then(const PointMap& next) const;  // next o this
};

/// z = (d i + b) / (c i + a) for M = [[a, b], [c, d]]. Throws std::domain_error
/// for det <= 0 unless allow_reversing, in which case |det| is used (the
/// mirror surface, identified through R).
HPoint point_of_surface(const Mat2& m, bool allow_reversing = false);
HPoint point_of_surface(const std::array<double, 4>& m, bool allow_reversing = false);

/// Induced action of right multiplication by g: point_of_surface(M g) = act(g)(point_of_surface(M)).
PointMap induced_action(const Mat2& g);
PointMap induced_action(const std::array<double, 4>& g);

double dist_points(HPoint z, HPoint w);
double dist_point_geodesic(HPoint z, const HGeodesic& g);

/// |sin| of the angle between the images under M of the directions d and d'.
double angle_between_directions(const Mat2& m, const CoSlope& d, const CoSlope& e);
double angle_between_directions(const std::array<double, 4>& m, double d, double e);

struct FundDomain {
    int n = 8;
    double phi = 0;
    explicit FundDomain(int n);
    /// {|Re z| <= Phi/2} and {|z +- 1/Phi| >= 1/Phi}, up to tol.
    bool contains(HPoint z, double tol = 1e-9) const;
};

enum class Gen { TH, THinv, TV, TVinv };
std::string gen_name(Gen g);

struct Reduction {
    HPoint point;
    std::vector<Gen> word;  // applied in order: point = act(g_k) ... act(g_1) z
    bool converged = true;
};

Reduction reduce_to_fundamental_domain(int n, HPoint z, int max_steps = 10000);
/// Image of base under the word, reduced; the whole computation runs in
/// 113-bit floats so that long words do not lose the point near the boundary.
Reduction reduce_word_image(int n, const std::vector<Gen>& word, HPoint base, int max_steps = 10000);
PointMap gen_action(int n, Gen g);
HPoint apply_word(int n, const std::vector<Gen>& word, HPoint z);

struct GmaxDistance {
    double distance = 0;
    bool converged = false;
    HPoint reduced;
    double nearest_k = 0;  // inf for the member x = 0
    HGeodesic nearest;     // a nearest orbit member, in the coordinates of z
};

/// Distance from z to the images under words of length <= W of the geodesics
/// {x = 0} and {x = +-1/(k Phi)}, k >= 1. Members k <= K_max are tabulated one
/// by one; the rest are reached through the strip they fill, so the value does
/// not depend on K_max. converged: reduction converged and the value is
/// unchanged with (K_max + 2, W + 2).
GmaxDistance dist_to_Gmax(int n, HPoint z, int K_max = 12, int W = 10);

}  // namespace kvol
