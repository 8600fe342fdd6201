#pragma once

#include <cmath>

#include "uvtransfer/errors.hpp"

namespace uvt {

struct Vec2 {
    double u = 0.0;
    double v = 0.0;

    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }

constexpr double cross(Vec2 a, Vec2 b) { return a.u * b.v - a.v * b.u; }

/// Triangle in UV space; corner order defines winding.
struct Triangle2D {
    Vec2 a, b, c;

    friend constexpr bool operator==(const Triangle2D&, const Triangle2D&) = default;
};

/// Triangles with |signed area| below this are treated as degenerate.
inline constexpr double kDegenerateArea = 1e-12;

/// Half the cross product of the two edges leaving `a`. Positive for
/// counter-clockwise winding.
constexpr double signed_area(const Triangle2D& t) {
    return 0.5 * cross(t.b - t.a, t.c - t.a);
}

inline bool is_degenerate(const Triangle2D& t) {
    return std::abs(signed_area(t)) < kDegenerateArea;
}

struct BaryCoords {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    /// All weights >= -eps.
    constexpr bool inside(double eps) const {
        return alpha >= -eps && beta >= -eps && gamma >= -eps;
    }
};

/// Barycentric coordinates of `p` with respect to `t`. Beta and gamma come
/// from sub-triangle area ratios; alpha closes the partition of unity.
/// Throws DegenerateTriangleError when |signed_area(t)| < kDegenerateArea.
inline BaryCoords barycentric(Vec2 p, const Triangle2D& t) {
    if (is_degenerate(t)) throw DegenerateTriangleError();
    const Vec2 ab = t.b - t.a;
    const Vec2 ac = t.c - t.a;
    const Vec2 ap = p - t.a;
    const double d = cross(ab, ac);
    const double beta = cross(ap, ac) / d;
    const double gamma = cross(ab, ap) / d;
    return {1.0 - beta - gamma, beta, gamma};
}

/// Affine combination alpha*a + beta*b + gamma*c of the source triangle.
constexpr Vec2 map_source_point(const BaryCoords& bc, const Triangle2D& src) {
    return {bc.alpha * src.a.u + bc.beta * src.b.u + bc.gamma * src.c.u,
            bc.alpha * src.a.v + bc.beta * src.b.v + bc.gamma * src.c.v};
}

}  // namespace uvt
