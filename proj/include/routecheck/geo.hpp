#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace routecheck {

// Spherical Web Mercator radius (EPSG:3857) and IUGG mean Earth radius.
inline constexpr double kWebMercatorRadiusM = 6378137.0;
inline constexpr double kMeanEarthRadiusM = 6371008.8;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kMetersPerDegree = kMeanEarthRadiusM * kDegToRad;
// Practical Web Mercator latitude cutoff; content far above/below is rejected.
inline constexpr double kMercatorMaxLatDeg = 85.06;

struct GeoPoint {
    double lon = 0.0;  // degrees east, [-180, 180]
    double lat = 0.0;  // degrees north, strictly inside (-90, 90)

    bool operator==(const GeoPoint&) const = default;
};

bool is_valid(const GeoPoint& p);
void require_valid(const GeoPoint& p, std::string_view what);

enum class FrameKind { WebMercator, LocalEquirect };

struct Frame {
    FrameKind kind = FrameKind::WebMercator;
    GeoPoint origin{};  // meaningful for LocalEquirect only

    bool operator==(const Frame&) const = default;
};

struct ProjectedPoint {
    double x = 0.0;  // meters
    double y = 0.0;  // meters
    Frame frame{};
};

enum class Mode : unsigned char { Rail = 0, HhTruck = 1, Barge = 2 };
inline constexpr int kModeCount = 3;

const char* mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view name);

// Ordered geographic vertices with one transport-mode tag per segment.
struct RoutePolyline {
    std::vector<GeoPoint> vertices;
    std::vector<Mode> segment_modes;

    std::size_t segment_count() const {
        return vertices.size() < 2 ? 0 : vertices.size() - 1;
    }
    // Throws std::invalid_argument when the polyline invariants do not hold
    // (>= 2 vertices, valid coordinates, mode list length, no identical
    // consecutive vertices).
    void check() const;
};

struct BoundingBox {
    double lon_min = 0.0, lon_max = 0.0;
    double lat_min = 0.0, lat_max = 0.0;
};

BoundingBox bounds(std::span<const GeoPoint> pts);
BoundingBox bounds(std::span<const RoutePolyline> parts);

// --- projections ------------------------------------------------------------

ProjectedPoint to_web_mercator(const GeoPoint& p);
GeoPoint from_web_mercator(const ProjectedPoint& p);

// Planar frame for small-area work (buffer sampling, intersection tests):
// x = R * dlon_rad * cos(lat0), y = R * dlat_rad, R = mean Earth radius.
class LocalFrame {
public:
    explicit LocalFrame(GeoPoint origin);

    ProjectedPoint to_local(const GeoPoint& p) const;
    GeoPoint to_geo(double x_m, double y_m) const;
    const GeoPoint& origin() const { return origin_; }

private:
    GeoPoint origin_;
    double cos_lat0_;
};

// --- distances --------------------------------------------------------------

double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Sum of per-segment great-circle distances (mean Earth radius sphere).
double geodesic_length_m(const RoutePolyline& route);

// Euclidean length of the polyline after projecting every vertex to
// Web Mercator. Inflated by ~sec(lat) relative to ground distance.
double planar_length_mercator_m(const RoutePolyline& route);

// Per-segment Mercator length scaled by cos(mid-latitude); a second,
// Mercator-based estimate of ground distance.
double ground_corrected_length_m(const RoutePolyline& route);

// --- buffers ----------------------------------------------------------------

// Vertex coordinates split into parallel arrays for the batch kernels.
struct RouteShape {
    std::vector<double> lon;
    std::vector<double> lat;

    RouteShape() = default;
    explicit RouteShape(const RoutePolyline& route);
    explicit RouteShape(std::span<const GeoPoint> pts);

    std::size_t vertex_count() const { return lon.size(); }
};

std::vector<RouteShape> make_shapes(std::span<const RoutePolyline> parts);

// dist[i] = min over segments of the planar distance from point i, each
// point evaluated in its own local equirectangular frame.
void min_distance_batch(const RouteShape& shape, std::span<const double> lon_deg,
                        std::span<const double> lat_deg, std::span<double> dist_m);
// Elementwise min across several polylines (buffer of a multi-part geometry).
void min_distance_batch(std::span<const RouteShape> shapes, std::span<const double> lon_deg,
                        std::span<const double> lat_deg, std::span<double> dist_m);

double distance_point_to_route_m(const GeoPoint& p, const RoutePolyline& route);

// Closed buffer: distance <= width counts as inside.
bool in_buffer(const GeoPoint& p, const RoutePolyline& route, double width_m);

// Grid quadrature of the buffer footprint: cell-centered samples at the
// given pitch over the inflated bounding box, hit count * spacing^2.
// Requires 0 < spacing <= width / 10.
double buffer_area_m2(const RoutePolyline& route, double width_m, double spacing_m);
// Union of buffers over several parts, sampled on one shared grid.
double buffer_area_m2(std::span<const RoutePolyline> parts, double width_m, double spacing_m);

// --- polyline helpers -------------------------------------------------------

// Splits long segments by inserting interpolated vertices so that no leg
// exceeds max_leg_m. Mode tags are carried onto the pieces.
RoutePolyline densify(const RoutePolyline& route, double max_leg_m);

RoutePolyline reversed(const RoutePolyline& route);

// Contiguous same-mode runs as standalone polylines (shared junction
// vertices duplicated into both neighbours).
std::vector<RoutePolyline> split_mode_runs(const RoutePolyline& route);

}  // namespace routecheck
