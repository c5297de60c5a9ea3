#ifndef NLS_GEOMETRY_HPP
#define NLS_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace nls {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

struct Triangle {
    std::array<Vec2, 3> v;

    double area() const {
        return 0.5 * cross(v[1] - v[0], v[2] - v[0]);
    }
    Vec2 centroid() const {
        return {(v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0};
    }
    // radius of the centroid-centered bounding circle
    double bounding_radius() const {
        Vec2 c = centroid();
        double r2 = 0.0;
        for (auto& p : v) r2 = std::max(r2, norm2(p - c));
        return std::sqrt(r2);
    }
};

// Barycentric coordinates of p in t; no containment check.
inline std::array<double, 3> barycentric(const Triangle& t, Vec2 p) {
    Vec2 e1 = t.v[1] - t.v[0], e2 = t.v[2] - t.v[0], d = p - t.v[0];
    double det = cross(e1, e2);
    double l1 = cross(d, e2) / det;
    double l2 = cross(e1, d) / det;
    return {1.0 - l1 - l2, l1, l2};
}

// Small fixed-capacity convex polygon (intersections of two triangles,
// Minkowski difference bodies of triangle pairs).
struct Polygon {
    static constexpr int kCap = 10;
    std::array<Vec2, kCap> p{};
    int n = 0;

    void push(Vec2 q) { p[n++] = q; }

    double area() const {
        double a = 0.0;
        for (int i = 0; i < n; ++i) a += cross(p[i], p[(i + 1) % n]);
        return 0.5 * a;
    }
};

// Sutherland-Hodgman clip of convex `poly` against the half-plane left of (a,b).
inline Polygon clip_halfplane(const Polygon& poly, Vec2 a, Vec2 b) {
    Polygon out;
    if (poly.n == 0) return out;
    Vec2 e = b - a;
    auto side = [&](Vec2 q) { return cross(e, q - a); };
    for (int i = 0; i < poly.n; ++i) {
        Vec2 cur = poly.p[i];
        Vec2 nxt = poly.p[(i + 1) % poly.n];
        double sc = side(cur), sn = side(nxt);
        if (sc >= 0.0) {
            if (out.n < Polygon::kCap) out.push(cur);
            if (sn < 0.0) {
                double t = sc / (sc - sn);
                if (out.n < Polygon::kCap) out.push(cur + t * (nxt - cur));
            }
        } else if (sn >= 0.0) {
            double t = sc / (sc - sn);
            if (out.n < Polygon::kCap) out.push(cur + t * (nxt - cur));
        }
    }
    return out;
}

// T1 ∩ (T2 + shift); both triangles CCW.
inline Polygon intersect_shifted(const Triangle& t1, const Triangle& t2, Vec2 shift) {
    Polygon poly;
    poly.push(t1.v[0]);
    poly.push(t1.v[1]);
    poly.push(t1.v[2]);
    for (int k = 0; k < 3 && poly.n; ++k)
        poly = clip_halfplane(poly, t2.v[k] + shift, t2.v[(k + 1) % 3] + shift);
    return poly;
}

// Minkowski difference body H = {b - a : a in t1, b in t2} = t2 ⊕ (-t1),
// a CCW convex polygon with up to 6 vertices. Collinear edges are merged.
inline Polygon minkowski_difference(const Triangle& t1, const Triangle& t2) {
    // Edge vectors of t2 and of -t1 (reflected triangle is CCW again).
    std::array<Vec2, 6> edges;
    for (int k = 0; k < 3; ++k) edges[k] = t2.v[(k + 1) % 3] - t2.v[k];
    for (int k = 0; k < 3; ++k) edges[3 + k] = -(t1.v[(k + 1) % 3] - t1.v[k]);

    // Start vertex: lowest point of t2 minus highest point of t1 (lexicographic).
    auto lowest = [](const Triangle& t, int sign) {
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            double dy = sign * t.v[k].y - sign * t.v[best].y;
            if (dy < 0 || (dy == 0 && sign * t.v[k].x < sign * t.v[best].x)) best = k;
        }
        return t.v[best];
    };
    Vec2 start = lowest(t2, +1) - lowest(t1, -1);

    // Sort edges CCW by angle in [0, 2pi) so the chain starts at the
    // bottom-most vertex; stable on ties.
    std::array<int, 6> order{0, 1, 2, 3, 4, 5};
    auto angle = [&](int i) {
        double a = std::atan2(edges[i].y, edges[i].x);
        return a < 0 ? a + 2.0 * M_PI : a;
    };
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (angle(order[j]) < angle(order[i])) std::swap(order[i], order[j]);

    Polygon h;
    Vec2 cur = start;
    h.push(cur);
    for (int i = 0; i < 5; ++i) {
        cur = cur + edges[order[i]];
        h.push(cur);
    }
    // Drop near-duplicate vertices (parallel summand edges).
    Polygon out;
    double scale2 = 0.0;
    for (int i = 0; i < h.n; ++i) scale2 = std::max(scale2, norm2(h.p[i] - h.p[0]));
    for (int i = 0; i < h.n; ++i) {
        Vec2 b = h.p[i], c = h.p[(i + 1) % h.n];
        if (norm2(c - b) < 1e-26 * (scale2 + 1e-300)) continue;
        if (out.n < Polygon::kCap) out.push(b);
    }
    return out;
}

// Distance from a triangle to an axis-aligned rectangle, assuming the two do
// not overlap. Exact: the minimum over each edge piece of the (convex)
// distance function is attained at vertices or at crossings with the
// rectangle's axis lines.
inline double dist_triangle_rect(const Triangle& t, double x0, double y0, double x1, double y1) {
    auto dist_point = [&](Vec2 p) {
        double dx = std::max({0.0, x0 - p.x, p.x - x1});
        double dy = std::max({0.0, y0 - p.y, p.y - y1});
        return std::sqrt(dx * dx + dy * dy);
    };
    double best = 1e300;
    for (int k = 0; k < 3; ++k) {
        Vec2 a = t.v[k], b = t.v[(k + 1) % 3];
        best = std::min(best, dist_point(a));
        for (double line : {x0, x1}) {
            if ((a.x - line) * (b.x - line) < 0.0) {
                double s = (line - a.x) / (b.x - a.x);
                best = std::min(best, dist_point(a + s * (b - a)));
            }
        }
        for (double line : {y0, y1}) {
            if ((a.y - line) * (b.y - line) < 0.0) {
                double s = (line - a.y) / (b.y - a.y);
                best = std::min(best, dist_point(a + s * (b - a)));
            }
        }
    }
    return best;
}

// Intersections of the ray r*dir (r>0) from the origin with the boundary of a
// convex CCW polygon. Returns the number of hits (0, 1, or 2) with radii in
// ascending order; a single hit means the origin is inside (entry radius 0).
inline int ray_polygon(const Polygon& poly, Vec2 dir, double& r_lo, double& r_hi) {
    double scale = 0.0;
    for (int i = 0; i < poly.n; ++i) scale = std::max(scale, norm2(poly.p[i]));
    scale = std::sqrt(scale);

    bool inside = true;  // origin in the closed polygon
    for (int i = 0; i < poly.n; ++i) {
        Vec2 a = poly.p[i], b = poly.p[(i + 1) % poly.n];
        if (cross(b - a, -a) < -1e-13 * scale * norm(b - a)) {
            inside = false;
            break;
        }
    }

    double lo = 1e300, hi = -1e300;
    int hits = 0;
    for (int i = 0; i < poly.n; ++i) {
        Vec2 a = poly.p[i], b = poly.p[(i + 1) % poly.n];
        Vec2 e = b - a;
        double denom = cross(dir, e);
        if (std::abs(denom) < 1e-300) continue;
        double r = cross(a, e) / denom;
        double t = cross(a, dir) / denom;  // parameter along the edge
        if (t < -1e-12 || t > 1.0 + 1e-12) continue;
        if (r < 0.0) continue;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++hits;
    }
    if (hits == 0 || hi <= 0.0) return 0;
    if (inside) {
        r_lo = 0.0;
        r_hi = hi;
        return 1;
    }
    if (hi - lo < 1e-14 * (scale + hi)) return 0;  // grazing a corner
    r_lo = lo;
    r_hi = hi;
    return 2;
}

}  // namespace nls

#endif
