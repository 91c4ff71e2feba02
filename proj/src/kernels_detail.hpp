#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "routecheck/geo.hpp"

namespace routecheck::kern::detail {

void min_distance_scalar(const double* lon_deg, const double* lat_deg, std::size_t npts,
                         const double* vlon_deg, const double* vlat_deg, std::size_t nvert,
                         double* dist_m);
#ifdef ROUTECHECK_HAVE_AVX2
void min_distance_avx2(const double* lon_deg, const double* lat_deg, std::size_t npts,
                       const double* vlon_deg, const double* vlat_deg, std::size_t nvert,
                       double* dist_m);
#endif

// Reference per-point evaluation. The SIMD variants replicate this exact
// operation sequence per lane (no FMA anywhere), so outputs compare equal
// bit for bit across implementations.
inline double point_min_distance(double plon, double plat, const double* vlon,
                                 const double* vlat, std::size_t nvert) {
    const double kx = kMetersPerDegree * std::cos(plat * kDegToRad);
    const double ky = kMetersPerDegree;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < nvert; ++j) {
        const double ax = (vlon[j] - plon) * kx;
        const double ay = (vlat[j] - plat) * ky;
        const double bx = (vlon[j + 1] - plon) * kx;
        const double by = (vlat[j + 1] - plat) * ky;
        const double dx = bx - ax;
        const double dy = by - ay;
        const double len2 = dx * dx + dy * dy;
        const double dot = ax * dx + ay * dy;
        double t = -dot / len2;
        t = t < 0.0 ? 0.0 : t;
        t = t > 1.0 ? 1.0 : t;
        const double cx = ax + t * dx;
        const double cy = ay + t * dy;
        const double d2_seg = cx * cx + cy * cy;
        const double d2_end = ax * ax + ay * ay;
        const double d2 = len2 > 0.0 ? d2_seg : d2_end;
        best = d2 < best ? d2 : best;
    }
    return std::sqrt(best);
}

}  // namespace routecheck::kern::detail
