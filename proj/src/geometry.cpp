#include "chunkcount/geometry.hpp"

#include "chunkcount/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chunkcount {

namespace {

// Orientation of r relative to p->q with the same tolerance as side_of_line.
int orientation(Point2 p, Point2 q, Point2 r) {
    const Point2 d = q - p;
    const double len = norm(d);
    const double c = cross(d, r - p);
    if (len == 0.0) {
        return 0;
    }
    if (std::abs(c) <= kGeomEpsilon * len) {
        return 0;
    }
    return c > 0 ? 1 : -1;
}

bool within_box(Point2 p, Point2 a, Point2 b) {
    return p.x >= std::min(a.x, b.x) - kGeomEpsilon && p.x <= std::max(a.x, b.x) + kGeomEpsilon &&
           p.y >= std::min(a.y, b.y) - kGeomEpsilon && p.y <= std::max(a.y, b.y) + kGeomEpsilon;
}

bool on_segment(Point2 p, Point2 a, Point2 b) {
    return orientation(a, b, p) == 0 && within_box(p, a, b);
}

}  // namespace

Point2::Point2(double x_, double y_) : x(x_), y(y_) {
    if (!std::isfinite(x_) || !std::isfinite(y_)) {
        throw ValidationError("point", "coordinates must be finite");
    }
}

double norm(Point2 p) { return std::hypot(p.x, p.y); }

Segment::Segment(Point2 a, Point2 b) : a_(a), b_(b) {
    if (norm(b - a) <= kGeomEpsilon) {
        throw ValidationError("segment", "endpoints must be distinct");
    }
}

double Segment::length() const noexcept { return norm(b_ - a_); }

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) {
        throw ValidationError("polygon", "needs at least 3 vertices, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (norm(vertices_[(i + 1) % n] - vertices_[i]) <= kGeomEpsilon) {
            throw ValidationError("polygon", "consecutive vertices " + std::to_string(i) + " and " +
                                                 std::to_string((i + 1) % n) + " coincide");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a1 = vertices_[i];
        const Point2 a2 = vertices_[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 b1 = vertices_[j];
            const Point2 b2 = vertices_[(j + 1) % n];
            const bool adjacent_after = j == i + 1;
            const bool adjacent_wrap = i == 0 && j == n - 1;
            if (adjacent_after) {
                // Shared vertex a2 == b1; fold-back overlaps are still invalid.
                if (on_segment(b2, a1, a2) || on_segment(a1, b1, b2)) {
                    throw ValidationError("polygon", "edges " + std::to_string(i) + " and " +
                                                         std::to_string(j) + " overlap");
                }
            } else if (adjacent_wrap) {
                if (on_segment(a2, b1, b2) || on_segment(b1, a1, a2)) {
                    throw ValidationError("polygon", "edges " + std::to_string(i) + " and " +
                                                         std::to_string(j) + " overlap");
                }
            } else if (segments_intersect(a1, a2, b1, b2)) {
                throw ValidationError("polygon", "edges " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " intersect");
            }
        }
    }
}

std::pair<Point2, Point2> Polygon::bounds() const {
    Point2 lo = vertices_.front();
    Point2 hi = vertices_.front();
    for (const auto& v : vertices_) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    return {lo, hi};
}

int side_of_line(Point2 p, const Segment& line) {
    return orientation(line.a(), line.b(), p);
}

std::optional<CrossingEvent> crossing(Point2 prev, Point2 curr, const Segment& line) {
    const int s0 = side_of_line(prev, line);
    const int s1 = side_of_line(curr, line);
    if (s0 == 0 || s1 == 0 || s0 == s1) {
        return std::nullopt;
    }
    const Point2 move = curr - prev;
    const Point2 edge = line.vector();
    const double denom = cross(move, edge);
    if (denom == 0.0) {
        return std::nullopt;
    }
    const Point2 rel = line.a() - prev;
    const double t = cross(rel, edge) / denom;  // along the movement
    const double u = cross(rel, move) / denom;  // along the counting line
    const double tol_u = kGeomEpsilon / line.length();
    if (t < 0.0 || t > 1.0 || u < -tol_u || u > 1.0 + tol_u) {
        return std::nullopt;
    }
    return CrossingEvent{s1, prev + t * move};
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 * o2 < 0 && o3 * o4 < 0) {
        return true;
    }
    return (o1 == 0 && within_box(q1, p1, p2)) || (o2 == 0 && within_box(q2, p1, p2)) ||
           (o3 == 0 && within_box(p1, q1, q2)) || (o4 == 0 && within_box(p2, q1, q2));
}

bool point_in_polygon(Point2 p, const Polygon& poly) {
    const auto verts = poly.vertices();
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, verts[i], verts[(i + 1) % n])) {
            return true;
        }
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 vi = verts[i];
        const Point2 vj = verts[j];
        if ((vi.y > p.y) != (vj.y > p.y)) {
            const double x_at = vj.x + (p.y - vj.y) * (vi.x - vj.x) / (vi.y - vj.y);
            if (p.x < x_at) {
                inside = !inside;
            }
        }
    }
    return inside;
}

}  // namespace chunkcount
