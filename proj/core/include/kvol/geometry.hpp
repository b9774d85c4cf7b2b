#pragma once

#include "kvol/field.hpp"

#include <array>
#include <optional>
#include <string>

namespace kvol {

struct Vec2 {
    CycloReal x, y;

    static Vec2 zero(int n) { return {CycloReal::zero(n), CycloReal::zero(n)}; }
    bool is_zero() const { return x.is_zero() && y.is_zero(); }
    std::array<double, 2> to_double() const { return {x.to_double(), y.to_double()}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Vec2& o) const { return !(*this == o); }
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
inline Vec2 operator*(const CycloReal& s, const Vec2& a) { return {s * a.x, s * a.y}; }
inline CycloReal wedge(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline CycloReal dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline CycloReal norm2(const Vec2& a) { return dot(a, a); }
/// Rotation by +90 degrees.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// Same ray: parallel with positive dot product.
bool same_direction(const Vec2& a, const Vec2& b);
bool parallel(const Vec2& a, const Vec2& b);

/// Compares the ccw angles (in [0, 2pi)) from ref to a and from ref to b.
/// Returns -1, 0, +1.
int compare_ccw_angle(const Vec2& ref, const Vec2& a, const Vec2& b);

/// Canonical half-plane orientation: y > 0, or y = 0 and x > 0.
bool is_canonical(const Vec2& v);
Vec2 canonical(const Vec2& v);

struct Mat2 {
    CycloReal a, b, c, d;

    static Mat2 identity(int n);
    CycloReal det() const { return a * d - b * c; }
    Mat2 inverse() const;
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    std::array<double, 4> to_double() const { return {a.to_double(), b.to_double(), c.to_double(), d.to_double()}; }
};

/// Direction written as co-slope x/y; horizontal is infinity.
struct CoSlope {
    bool infinite = false;
    CycloReal value;

    static CoSlope inf() { return {true, {}}; }
    static CoSlope of(const CycloReal& v) { return {false, v}; }
    static CoSlope of_vector(const Vec2& v);
    /// (value, 1) or (1, 0).
    Vec2 vector(int n) const;
    double to_double() const;
    std::string to_string() const;
    bool operator==(const CoSlope& o) const;
};

}  // namespace kvol
