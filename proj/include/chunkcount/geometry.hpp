#pragma once

#include <optional>
#include <span>
#include <vector>

namespace chunkcount {

// Collinearity / degeneracy tolerance in pixel units.
inline constexpr double kGeomEpsilon = 1e-9;

// A finite point in image coordinates. Construction rejects NaN and infinity.
class Point2 {
public:
    double x = 0.0;
    double y = 0.0;

    constexpr Point2() = default;
    Point2(double x_, double y_);

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 p);

// Directed segment a -> b with a != b.
class Segment {
public:
    Segment(Point2 a, Point2 b);

    Point2 a() const noexcept { return a_; }
    Point2 b() const noexcept { return b_; }
    Point2 vector() const noexcept { return b_ - a_; }
    double length() const noexcept;

    friend bool operator==(const Segment&, const Segment&) = default;

private:
    Point2 a_;
    Point2 b_;
};

// Simple polygon: at least three vertices, consecutive vertices distinct,
// no self-intersection. Orientation is free.
class Polygon {
public:
    explicit Polygon(std::vector<Point2> vertices);

    std::span<const Point2> vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }

    // Axis-aligned bounding box as {min, max}.
    std::pair<Point2, Point2> bounds() const;

    friend bool operator==(const Polygon&, const Polygon&) = default;

private:
    std::vector<Point2> vertices_;
};

struct CrossingEvent {
    int direction_sign;  // side of the line the movement ends on, -1 or +1
    Point2 intersection;
};

// Sign of cross(line.b - line.a, p - line.a). Zero when p is within
// kGeomEpsilon (perpendicular distance) of the infinite line.
int side_of_line(Point2 p, const Segment& line);

// Event iff the movement prev -> curr strictly changes side and the two
// finite segments intersect. A point lying on the line never fires alone.
std::optional<CrossingEvent> crossing(Point2 prev, Point2 curr, const Segment& line);

// Even-odd membership; points on the boundary count as inside.
bool point_in_polygon(Point2 p, const Polygon& poly);

// Closed-segment intersection test (touching endpoints intersect).
bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2);

}  // namespace chunkcount
