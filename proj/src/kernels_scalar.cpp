#include "kernels_detail.hpp"

namespace routecheck::kern::detail {

void min_distance_scalar(const double* lon_deg, const double* lat_deg, std::size_t npts,
                         const double* vlon_deg, const double* vlat_deg, std::size_t nvert,
                         double* dist_m) {
    for (std::size_t i = 0; i < npts; ++i) {
        dist_m[i] = point_min_distance(lon_deg[i], lat_deg[i], vlon_deg, vlat_deg, nvert);
    }
}

}  // namespace routecheck::kern::detail
