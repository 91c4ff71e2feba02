#include "routecheck/validate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace routecheck {

const char* aberration_name(AberrationKind kind) {
    switch (kind) {
        case AberrationKind::DuplicateVertex: return "duplicate-vertex";
        case AberrationKind::Spike: return "spike";
        case AberrationKind::Discontinuity: return "discontinuity";
        case AberrationKind::SelfIntersection: return "self-intersection";
    }
    return "?";
}

namespace {

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

// Closed segment intersection, including touching and collinear overlap.
bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2, const PlanarPoint& q1,
                        const PlanarPoint& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

std::vector<Aberration> validate_geometry(const RoutePolyline& route,
                                          const GeometryThresholds& thresholds) {
    const auto& v = route.vertices;
    if (v.size() < 2) {
        throw std::invalid_argument("validate_geometry: route needs at least 2 vertices");
    }
    std::vector<Aberration> found;

    // Segment lengths once; duplicates and jumps fall straight out of them.
    std::vector<double> seg_len(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        seg_len[i] = haversine_m(v[i], v[i + 1]);
        if (seg_len[i] < thresholds.duplicate_m) {
            found.push_back({AberrationKind::DuplicateVertex, i + 1, i + 1, seg_len[i]});
        } else if (seg_len[i] > thresholds.jump_m) {
            found.push_back({AberrationKind::Discontinuity, i, i, seg_len[i]});
        }
    }

    // Spikes: near-reversal turns where the shorter adjacent leg is short.
    // Duplicate-degenerate legs have no usable direction and are skipped.
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (seg_len[i - 1] < thresholds.duplicate_m || seg_len[i] < thresholds.duplicate_m) {
            continue;
        }
        if (std::min(seg_len[i - 1], seg_len[i]) >= thresholds.spike_leg_m) continue;
        const LocalFrame frame(v[i]);
        const ProjectedPoint prev = frame.to_local(v[i - 1]);
        const ProjectedPoint next = frame.to_local(v[i + 1]);
        const double in_x = -prev.x, in_y = -prev.y;  // direction of travel into the apex
        const double dot = in_x * next.x + in_y * next.y;
        const double norms = std::hypot(in_x, in_y) * std::hypot(next.x, next.y);
        if (norms <= 0.0) continue;
        const double turn_deg = std::acos(std::clamp(dot / norms, -1.0, 1.0)) * kRadToDeg;
        if (turn_deg > thresholds.spike_angle_deg) {
            found.push_back({AberrationKind::Spike, i, i, turn_deg});
        }
    }

    // Self-intersections among non-adjacent segments, in a shared planar frame.
    const BoundingBox bb = bounds(std::span<const GeoPoint>(v));
    const LocalFrame frame(
        GeoPoint{0.5 * (bb.lon_min + bb.lon_max), 0.5 * (bb.lat_min + bb.lat_max)});
    std::vector<PlanarPoint> pv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const ProjectedPoint q = frame.to_local(v[i]);
        pv[i] = {q.x, q.y};
    }
    // Segments below the duplicate threshold are effectively points: they are
    // reported above and excluded here, and the segments on either side of
    // them count as adjacent.
    const auto degenerate = [&](std::size_t s) { return seg_len[s] < thresholds.duplicate_m; };
    for (std::size_t i = 0; i + 1 < pv.size(); ++i) {
        if (degenerate(i)) continue;
        std::size_t effective_next = i + 1;
        while (effective_next + 1 < pv.size() && degenerate(effective_next)) ++effective_next;
        for (std::size_t j = i + 2; j + 1 < pv.size(); ++j) {
            if (degenerate(j) || j == effective_next) continue;
            if (i == 0 && j + 2 == pv.size() && pv.front().x == pv.back().x &&
                pv.front().y == pv.back().y) {
                continue;  // deliberately closed loop: first/last touching is not a defect
            }
            if (segments_intersect(pv[i], pv[i + 1], pv[j], pv[j + 1])) {
                found.push_back({AberrationKind::SelfIntersection, i, j, 0.0});
            }
        }
    }

    return found;
}

}  // namespace routecheck
