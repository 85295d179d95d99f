#include "banff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "banff/errors.hpp"

namespace banff {

BoundingBox bounding_box(std::span<const Point2> points) {
    if (points.empty()) return {};
    BoundingBox box{points.front(), points.front()};
    for (const Point2& p : points.subspan(1)) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
    }
    return box;
}

BoundingBox merge(const BoundingBox& a, const BoundingBox& b) {
    return {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y)},
            {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y)}};
}

double orientation(Point2 a, Point2 b, Point2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double signed_area(std::span<const Point2> vertices) {
    if (vertices.size() < 3) return 0.0;
    // Relative to the first vertex to keep precision for large pixel offsets.
    const Point2 o = vertices.front();
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < vertices.size(); ++i) {
        twice += orientation(o, vertices[i], vertices[i + 1]);
    }
    return 0.5 * twice;
}

bool on_segment(Point2 p, Point2 a, Point2 b) {
    if (p.x < std::min(a.x, b.x) || p.x > std::max(a.x, b.x)) return false;
    if (p.y < std::min(a.y, b.y) || p.y > std::max(a.y, b.y)) return false;
    return orientation(a, b, p) == 0.0;
}

Ring::Ring(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw DegenerateGeometry("ring has " + std::to_string(vertices_.size()) +
                                 " vertices; at least 3 are required");
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point2& p = vertices_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw DegenerateGeometry("ring vertex " + std::to_string(i) + " is not finite");
        }
        if (p == vertices_[(i + 1) % vertices_.size()]) {
            throw DegenerateGeometry("ring repeats vertex " + std::to_string(i) +
                                     " consecutively");
        }
    }
    bbox_ = bounding_box(vertices_);
    signed_area_ = banff::signed_area(vertices_);
    if (signed_area_ == 0.0) throw DegenerateGeometry("ring encloses zero area");
}

RingLocation locate(Point2 p, const Ring& ring) {
    if (!ring.bbox().contains(p)) return RingLocation::Outside;
    const auto v = ring.vertices();
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Point2 a = v[j];
        const Point2 b = v[i];
        if (on_segment(p, a, b)) return RingLocation::Boundary;
        // Half-open straddle rule; the side test uses the orientation sign so
        // that it agrees with the boundary test above.
        if ((a.y > p.y) != (b.y > p.y)) {
            const double o = orientation(a, b, p);
            if (b.y > a.y ? o > 0.0 : o < 0.0) inside = !inside;
        }
    }
    return inside ? RingLocation::Inside : RingLocation::Outside;
}

namespace {

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    const double d1 = orientation(q1, q2, p1);
    const double d2 = orientation(q1, q2, p2);
    const double d3 = orientation(p1, p2, q1);
    const double d4 = orientation(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return (d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
           (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2));
}

}  // namespace

bool is_simple(const Ring& ring) {
    const auto v = ring.vertices();
    const std::size_t n = v.size();

    // Adjacent edges may only meet at their shared vertex: reject spikes that
    // fold back along themselves.
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % n];
        const Point2 c = v[(i + 2) % n];
        if (orientation(a, b, c) == 0.0) {
            const double dot = (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y);
            if (dot < 0.0) return false;
        }
    }
    if (n == 3) return true;

    // Sweep over edges sorted by min x; only edges with overlapping x extents are tested.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto min_x = [&](std::size_t e) { return std::min(v[e].x, v[(e + 1) % n].x); };
    auto max_x = [&](std::size_t e) { return std::max(v[e].x, v[(e + 1) % n].x); };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return min_x(a) < min_x(b); });

    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t e = order[s];
        const double hi = max_x(e);
        for (std::size_t t = s + 1; t < n && min_x(order[t]) <= hi; ++t) {
            const std::size_t f = order[t];
            const std::size_t diff = e > f ? e - f : f - e;
            if (diff == 1 || diff == n - 1) continue;  // adjacent, handled above
            if (segments_intersect(v[e], v[(e + 1) % n], v[f], v[(f + 1) % n])) return false;
        }
    }
    return true;
}

PolygonWithHoles::PolygonWithHoles(Ring exterior, std::vector<Ring> holes)
    : exterior_(std::move(exterior)), holes_(std::move(holes)) {
    for (std::size_t h = 0; h < holes_.size(); ++h) {
        for (const Point2& p : holes_[h].vertices()) {
            if (locate(p, exterior_) == RingLocation::Outside) {
                throw DegenerateGeometry("hole " + std::to_string(h) +
                                         " extends outside the exterior ring");
            }
        }
        for (std::size_t k = 0; k < holes_.size(); ++k) {
            if (k == h) continue;
            for (const Point2& p : holes_[h].vertices()) {
                if (locate(p, holes_[k]) == RingLocation::Inside) {
                    throw DegenerateGeometry("hole " + std::to_string(h) + " is nested in hole " +
                                             std::to_string(k));
                }
            }
        }
    }
}

double polygon_area(const PolygonWithHoles& poly) {
    double area = std::abs(poly.exterior().signed_area());
    for (const Ring& hole : poly.holes()) area -= std::abs(hole.signed_area());
    return area;
}

bool point_in_polygon(Point2 p, const PolygonWithHoles& poly) {
    const RingLocation outer = locate(p, poly.exterior());
    if (outer == RingLocation::Outside) return false;
    if (outer == RingLocation::Boundary) return true;
    for (const Ring& hole : poly.holes()) {
        if (locate(p, hole) == RingLocation::Inside) return false;
    }
    return true;
}

void require_simple(const PolygonWithHoles& poly) {
    if (!is_simple(poly.exterior())) throw DegenerateGeometry("exterior ring self-intersects");
    for (std::size_t h = 0; h < poly.holes().size(); ++h) {
        if (!is_simple(poly.holes()[h])) {
            throw DegenerateGeometry("hole " + std::to_string(h) + " self-intersects");
        }
    }
}

}  // namespace banff
