#include "routecheck/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "routecheck/kernels.hpp"

namespace routecheck {

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
           p.lat > -90.0 && p.lat < 90.0;
}

void require_valid(const GeoPoint& p, std::string_view what) {
    if (!is_valid(p)) {
        throw std::domain_error(std::string(what) + ": coordinate out of range (lon=" +
                                std::to_string(p.lon) + ", lat=" + std::to_string(p.lat) + ")");
    }
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Rail: return "rail";
        case Mode::HhTruck: return "hh_truck";
        case Mode::Barge: return "barge";
    }
    return "?";
}

std::optional<Mode> mode_from_name(std::string_view name) {
    if (name == "rail") return Mode::Rail;
    if (name == "hh_truck") return Mode::HhTruck;
    if (name == "barge") return Mode::Barge;
    return std::nullopt;
}

void RoutePolyline::check() const {
    if (vertices.size() < 2) {
        throw std::invalid_argument("polyline needs at least 2 vertices");
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        require_valid(vertices[i], "vertex " + std::to_string(i));
    }
    if (segment_modes.size() != vertices.size() - 1) {
        throw std::invalid_argument("mode list length must be vertex count - 1 (got " +
                                    std::to_string(segment_modes.size()) + " for " +
                                    std::to_string(vertices.size()) + " vertices)");
    }
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        if (vertices[i] == vertices[i + 1]) {
            throw std::invalid_argument("identical consecutive vertices at index " +
                                        std::to_string(i));
        }
    }
}

BoundingBox bounds(std::span<const GeoPoint> pts) {
    if (pts.empty()) {
        throw std::invalid_argument("bounds: empty point set");
    }
    BoundingBox bb{pts[0].lon, pts[0].lon, pts[0].lat, pts[0].lat};
    for (const GeoPoint& p : pts) {
        bb.lon_min = std::min(bb.lon_min, p.lon);
        bb.lon_max = std::max(bb.lon_max, p.lon);
        bb.lat_min = std::min(bb.lat_min, p.lat);
        bb.lat_max = std::max(bb.lat_max, p.lat);
    }
    return bb;
}

BoundingBox bounds(std::span<const RoutePolyline> parts) {
    if (parts.empty()) {
        throw std::invalid_argument("bounds: no parts");
    }
    BoundingBox bb = bounds(std::span<const GeoPoint>(parts[0].vertices));
    for (const RoutePolyline& part : parts.subspan(1)) {
        const BoundingBox b = bounds(std::span<const GeoPoint>(part.vertices));
        bb.lon_min = std::min(bb.lon_min, b.lon_min);
        bb.lon_max = std::max(bb.lon_max, b.lon_max);
        bb.lat_min = std::min(bb.lat_min, b.lat_min);
        bb.lat_max = std::max(bb.lat_max, b.lat_max);
    }
    return bb;
}

// --- projections ------------------------------------------------------------

ProjectedPoint to_web_mercator(const GeoPoint& p) {
    require_valid(p, "to_web_mercator");
    if (std::abs(p.lat) >= kMercatorMaxLatDeg) {
        throw std::domain_error("to_web_mercator: latitude " + std::to_string(p.lat) +
                                " outside Mercator extent (|lat| < " +
                                std::to_string(kMercatorMaxLatDeg) + ")");
    }
    const double lam = p.lon * kDegToRad;
    const double phi = p.lat * kDegToRad;
    ProjectedPoint out;
    out.x = kWebMercatorRadiusM * lam;
    // atanh(sin(phi)) == ln(tan(pi/4 + phi/2)), better conditioned near zero.
    out.y = kWebMercatorRadiusM * std::atanh(std::sin(phi));
    out.frame = Frame{FrameKind::WebMercator, {}};
    return out;
}

GeoPoint from_web_mercator(const ProjectedPoint& p) {
    if (p.frame.kind != FrameKind::WebMercator) {
        throw std::invalid_argument("from_web_mercator: point is not in the web-mercator frame");
    }
    GeoPoint out;
    out.lon = (p.x / kWebMercatorRadiusM) * kRadToDeg;
    out.lat = (2.0 * std::atan(std::exp(p.y / kWebMercatorRadiusM)) - std::numbers::pi / 2.0) *
              kRadToDeg;
    return out;
}

LocalFrame::LocalFrame(GeoPoint origin) : origin_(origin) {
    require_valid(origin, "LocalFrame origin");
    cos_lat0_ = std::cos(origin.lat * kDegToRad);
}

ProjectedPoint LocalFrame::to_local(const GeoPoint& p) const {
    ProjectedPoint out;
    out.x = (p.lon - origin_.lon) * kDegToRad * kMeanEarthRadiusM * cos_lat0_;
    out.y = (p.lat - origin_.lat) * kDegToRad * kMeanEarthRadiusM;
    out.frame = Frame{FrameKind::LocalEquirect, origin_};
    return out;
}

GeoPoint LocalFrame::to_geo(double x_m, double y_m) const {
    GeoPoint out;
    out.lon = origin_.lon + x_m / (kMeanEarthRadiusM * cos_lat0_) * kRadToDeg;
    out.lat = origin_.lat + y_m / kMeanEarthRadiusM * kRadToDeg;
    return out;
}

// --- distances --------------------------------------------------------------

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlam = (b.lon - a.lon) * kDegToRad;
    const double sp = std::sin(dphi / 2.0);
    const double sl = std::sin(dlam / 2.0);
    const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    return 2.0 * kMeanEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double geodesic_length_m(const RoutePolyline& route) {
    route.check();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < route.vertices.size(); ++i) {
        total += haversine_m(route.vertices[i], route.vertices[i + 1]);
    }
    return total;
}

double planar_length_mercator_m(const RoutePolyline& route) {
    route.check();
    double total = 0.0;
    ProjectedPoint prev = to_web_mercator(route.vertices[0]);
    for (std::size_t i = 1; i < route.vertices.size(); ++i) {
        const ProjectedPoint cur = to_web_mercator(route.vertices[i]);
        total += std::hypot(cur.x - prev.x, cur.y - prev.y);
        prev = cur;
    }
    return total;
}

double ground_corrected_length_m(const RoutePolyline& route) {
    route.check();
    double total = 0.0;
    ProjectedPoint prev = to_web_mercator(route.vertices[0]);
    for (std::size_t i = 1; i < route.vertices.size(); ++i) {
        const ProjectedPoint cur = to_web_mercator(route.vertices[i]);
        const double planar = std::hypot(cur.x - prev.x, cur.y - prev.y);
        const double mid_lat = 0.5 * (route.vertices[i - 1].lat + route.vertices[i].lat);
        total += planar * std::cos(mid_lat * kDegToRad);
        prev = cur;
    }
    return total;
}

// --- buffers ----------------------------------------------------------------

RouteShape::RouteShape(const RoutePolyline& route) : RouteShape(std::span<const GeoPoint>(route.vertices)) {}

RouteShape::RouteShape(std::span<const GeoPoint> pts) {
    lon.reserve(pts.size());
    lat.reserve(pts.size());
    for (const GeoPoint& p : pts) {
        lon.push_back(p.lon);
        lat.push_back(p.lat);
    }
}

std::vector<RouteShape> make_shapes(std::span<const RoutePolyline> parts) {
    std::vector<RouteShape> shapes;
    shapes.reserve(parts.size());
    for (const RoutePolyline& part : parts) {
        part.check();
        shapes.emplace_back(part);
    }
    return shapes;
}

void min_distance_batch(const RouteShape& shape, std::span<const double> lon_deg,
                        std::span<const double> lat_deg, std::span<double> dist_m) {
    if (lon_deg.size() != lat_deg.size() || lon_deg.size() != dist_m.size()) {
        throw std::invalid_argument("min_distance_batch: size mismatch");
    }
    kern::min_distance_batch(lon_deg.data(), lat_deg.data(), lon_deg.size(), shape.lon.data(),
                             shape.lat.data(), shape.vertex_count(), dist_m.data());
}

void min_distance_batch(std::span<const RouteShape> shapes, std::span<const double> lon_deg,
                        std::span<const double> lat_deg, std::span<double> dist_m) {
    if (shapes.empty()) {
        throw std::invalid_argument("min_distance_batch: no shapes");
    }
    min_distance_batch(shapes[0], lon_deg, lat_deg, dist_m);
    if (shapes.size() == 1) return;
    std::vector<double> part(dist_m.size());
    for (const RouteShape& shape : shapes.subspan(1)) {
        min_distance_batch(shape, lon_deg, lat_deg, std::span<double>(part));
        for (std::size_t i = 0; i < dist_m.size(); ++i) {
            dist_m[i] = std::min(dist_m[i], part[i]);
        }
    }
}

double distance_point_to_route_m(const GeoPoint& p, const RoutePolyline& route) {
    route.check();
    require_valid(p, "distance_point_to_route");
    const RouteShape shape(route);
    double out = 0.0;
    kern::min_distance_batch(&p.lon, &p.lat, 1, shape.lon.data(), shape.lat.data(),
                             shape.vertex_count(), &out);
    return out;
}

bool in_buffer(const GeoPoint& p, const RoutePolyline& route, double width_m) {
    if (!(width_m > 0.0)) {
        throw std::domain_error("in_buffer: width must be positive");
    }
    return distance_point_to_route_m(p, route) <= width_m;
}

namespace {

double buffer_area_impl(std::span<const RoutePolyline> parts, double width_m, double spacing_m) {
    if (!(width_m > 0.0)) {
        throw std::domain_error("buffer_area: width must be positive");
    }
    if (!(spacing_m > 0.0) || spacing_m > width_m / 10.0) {
        throw std::domain_error("buffer_area: spacing must satisfy 0 < spacing <= width/10");
    }
    const std::vector<RouteShape> shapes = make_shapes(parts);

    const BoundingBox bb = bounds(parts);
    const LocalFrame frame(
        GeoPoint{0.5 * (bb.lon_min + bb.lon_max), 0.5 * (bb.lat_min + bb.lat_max)});

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (const RoutePolyline& part : parts) {
        for (const GeoPoint& v : part.vertices) {
            const ProjectedPoint q = frame.to_local(v);
            x_min = std::min(x_min, q.x);
            x_max = std::max(x_max, q.x);
            y_min = std::min(y_min, q.y);
            y_max = std::max(y_max, q.y);
        }
    }
    x_min -= width_m;
    x_max += width_m;
    y_min -= width_m;
    y_max += width_m;

    const auto nx = static_cast<std::size_t>(std::ceil((x_max - x_min) / spacing_m));
    const auto ny = static_cast<std::size_t>(std::ceil((y_max - y_min) / spacing_m));

    // Cell-centered samples; a row at a time through the batch kernel.
    std::vector<double> lons(nx), lats(nx), dist(nx);
    std::size_t hits = 0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double y = y_min + (static_cast<double>(iy) + 0.5) * spacing_m;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = x_min + (static_cast<double>(ix) + 0.5) * spacing_m;
            const GeoPoint g = frame.to_geo(x, y);
            lons[ix] = g.lon;
            lats[ix] = g.lat;
        }
        min_distance_batch(shapes, lons, lats, dist);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            if (dist[ix] <= width_m) ++hits;
        }
    }
    return static_cast<double>(hits) * spacing_m * spacing_m;
}

}  // namespace

double buffer_area_m2(const RoutePolyline& route, double width_m, double spacing_m) {
    return buffer_area_impl(std::span<const RoutePolyline>(&route, 1), width_m, spacing_m);
}

double buffer_area_m2(std::span<const RoutePolyline> parts, double width_m, double spacing_m) {
    return buffer_area_impl(parts, width_m, spacing_m);
}

// --- polyline helpers -------------------------------------------------------

RoutePolyline densify(const RoutePolyline& route, double max_leg_m) {
    route.check();
    if (!(max_leg_m > 0.0)) {
        throw std::domain_error("densify: max leg must be positive");
    }
    RoutePolyline out;
    out.vertices.push_back(route.vertices[0]);
    for (std::size_t i = 0; i + 1 < route.vertices.size(); ++i) {
        const GeoPoint& a = route.vertices[i];
        const GeoPoint& b = route.vertices[i + 1];
        const double len = haversine_m(a, b);
        const auto pieces = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(len / max_leg_m)));
        for (std::size_t k = 1; k <= pieces; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(pieces);
            GeoPoint v{a.lon + (b.lon - a.lon) * t, a.lat + (b.lat - a.lat) * t};
            if (k == pieces) v = b;
            out.vertices.push_back(v);
            out.segment_modes.push_back(route.segment_modes[i]);
        }
    }
    return out;
}

RoutePolyline reversed(const RoutePolyline& route) {
    RoutePolyline out;
    out.vertices.assign(route.vertices.rbegin(), route.vertices.rend());
    out.segment_modes.assign(route.segment_modes.rbegin(), route.segment_modes.rend());
    return out;
}

std::vector<RoutePolyline> split_mode_runs(const RoutePolyline& route) {
    route.check();
    std::vector<RoutePolyline> runs;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= route.segment_modes.size(); ++i) {
        if (i == route.segment_modes.size() || route.segment_modes[i] != route.segment_modes[start]) {
            RoutePolyline run;
            run.vertices.assign(route.vertices.begin() + static_cast<std::ptrdiff_t>(start),
                                route.vertices.begin() + static_cast<std::ptrdiff_t>(i + 1));
            run.segment_modes.assign(i - start, route.segment_modes[start]);
            runs.push_back(std::move(run));
            start = i;
        }
    }
    return runs;
}

}  // namespace routecheck
