#pragma once

#include <cstddef>
#include <vector>

#include "routecheck/geo.hpp"

namespace routecheck {

enum class AberrationKind { DuplicateVertex, Spike, Discontinuity, SelfIntersection };
const char* aberration_name(AberrationKind kind);

// One geometry defect. index_a/index_b identify where:
//   DuplicateVertex   index_a = second vertex of the pair, measure = separation m
//   Spike             index_a = apex vertex, measure = turn angle deg
//   Discontinuity     index_a = segment, measure = segment length m
//   SelfIntersection  index_a/index_b = crossing segments, measure = 0
struct Aberration {
    AberrationKind kind = AberrationKind::DuplicateVertex;
    std::size_t index_a = 0;
    std::size_t index_b = 0;
    double measure = 0.0;
};

struct GeometryThresholds {
    double duplicate_m = 1.0;        // consecutive vertices closer than this
    double spike_angle_deg = 170.0;  // turn sharper than this...
    double spike_leg_m = 100.0;      // ...with the shorter adjacent leg below this
    double jump_m = 10000.0;         // single segments longer than this
};

// Scans a route (>= 2 vertices; invariants may be violated, that is the
// point) and reports every defect found. Empty result means clean.
std::vector<Aberration> validate_geometry(const RoutePolyline& route,
                                          const GeometryThresholds& thresholds = {});

}  // namespace routecheck
