#pragma once

#include <span>
#include <vector>

namespace banff {

/// Pixel coordinates at base scan resolution.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

struct BoundingBox {
    Point2 min;
    Point2 max;

    bool contains(Point2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    bool intersects(const BoundingBox& o) const {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

BoundingBox bounding_box(std::span<const Point2> points);
BoundingBox merge(const BoundingBox& a, const BoundingBox& b);

/// Sign of the cross product (b - a) x (c - a): positive when c lies to the
/// left of the directed line a->b, zero when collinear.
double orientation(Point2 a, Point2 b, Point2 c);

/// Signed shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Point2> vertices);

/// True when p lies on the closed segment [a, b].
bool on_segment(Point2 p, Point2 a, Point2 b);

/// Closed, simple polygon boundary. The closing edge is implicit; callers must
/// not repeat the first vertex.
///
/// Construction enforces: at least 3 vertices, finite coordinates, non-zero
/// enclosed area. Simplicity is checked separately (see is_simple) because it is
/// quadratic in the vertex count and only needed where untrusted input enters.
class Ring {
public:
    explicit Ring(std::vector<Point2> vertices);

    std::span<const Point2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const BoundingBox& bbox() const { return bbox_; }
    double signed_area() const { return signed_area_; }

    friend bool operator==(const Ring& a, const Ring& b) { return a.vertices_ == b.vertices_; }

private:
    std::vector<Point2> vertices_;
    BoundingBox bbox_;
    double signed_area_ = 0.0;
};

enum class RingLocation { Outside, Boundary, Inside };

/// Crossing-number test with exact boundary detection.
RingLocation locate(Point2 p, const Ring& ring);

/// True when no two edges of the ring intersect other than adjacent edges at
/// their shared vertex.
bool is_simple(const Ring& ring);

/// Exterior ring with a flat list of holes.
///
/// Construction enforces that each hole lies inside the exterior and that no
/// hole lies inside another hole (checked on vertices).
class PolygonWithHoles {
public:
    explicit PolygonWithHoles(Ring exterior, std::vector<Ring> holes = {});

    const Ring& exterior() const { return exterior_; }
    std::span<const Ring> holes() const { return holes_; }
    const BoundingBox& bbox() const { return exterior_.bbox(); }

    friend bool operator==(const PolygonWithHoles&, const PolygonWithHoles&) = default;

private:
    Ring exterior_;
    std::vector<Ring> holes_;
};

/// |exterior area| minus the sum of |hole areas|.
double polygon_area(const PolygonWithHoles& poly);

/// Boundary-inclusive containment: points on the exterior or on any hole
/// boundary are inside; points strictly inside a hole are outside.
bool point_in_polygon(Point2 p, const PolygonWithHoles& poly);

/// Throws DegenerateGeometry when any ring of the polygon self-intersects.
void require_simple(const PolygonWithHoles& poly);

}  // namespace banff
