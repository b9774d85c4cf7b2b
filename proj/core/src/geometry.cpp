#include "kvol/geometry.hpp"

#include <limits>
#include <stdexcept>

namespace kvol {

bool same_direction(const Vec2& a, const Vec2& b) {
    return wedge(a, b).is_zero() && dot(a, b).sign() > 0;
}

bool parallel(const Vec2& a, const Vec2& b) { return wedge(a, b).is_zero(); }

namespace {

// 0 for angles in [0, pi), 1 for [pi, 2pi), measured from ref.
int half_of(const Vec2& ref, const Vec2& v) {
    int w = wedge(ref, v).sign();
    if (w > 0) return 0;
    if (w < 0) return 1;
    return dot(ref, v).sign() > 0 ? 0 : 1;
}

}  // namespace

int compare_ccw_angle(const Vec2& ref, const Vec2& a, const Vec2& b) {
    int ha = half_of(ref, a), hb = half_of(ref, b);
    if (ha != hb) return ha < hb ? -1 : 1;
    int w = wedge(a, b).sign();
    if (w == 0) {
        // same half and parallel: equal angle unless one is the zero-angle ray
        // and the other its opposite, which cannot share a half
        return 0;
    }
    return w > 0 ? -1 : 1;
}

bool is_canonical(const Vec2& v) {
    int sy = v.y.sign();
    return sy > 0 || (sy == 0 && v.x.sign() > 0);
}

Vec2 canonical(const Vec2& v) { return is_canonical(v) ? v : -v; }

Mat2 Mat2::identity(int n) {
    return {CycloReal::one(n), CycloReal::zero(n), CycloReal::zero(n), CycloReal::one(n)};
}

Mat2 Mat2::inverse() const {
    CycloReal dt = det();
    if (dt.is_zero()) throw std::domain_error("singular matrix");
    CycloReal r = dt.inverse();
    return {r * d, -(r * b), -(r * c), r * a};
}

CoSlope CoSlope::of_vector(const Vec2& v) {
    if (v.y.is_zero()) return inf();
    return of(v.x / v.y);
}

Vec2 CoSlope::vector(int n) const {
    if (infinite) return {CycloReal::one(n), CycloReal::zero(n)};
    return {value, CycloReal::one(n)};
}

double CoSlope::to_double() const {
    return infinite ? std::numeric_limits<double>::infinity() : value.to_double();
}

std::string CoSlope::to_string() const { return infinite ? std::string("inf") : value.to_string(); }

bool CoSlope::operator==(const CoSlope& o) const {
    if (infinite || o.infinite) return infinite == o.infinite;
    return value == o.value;
}

}  // namespace kvol
