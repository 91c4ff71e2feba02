#pragma once

#include <cstddef>

namespace routecheck::kern {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);

// Active implementation, chosen at startup (best available; the
// ROUTECHECK_ISA environment variable forces "scalar" or "avx2").
Isa active_isa();
// Test hook. Throws std::invalid_argument when the ISA is not available.
void set_isa(Isa isa);

// dist_m[i] = min over polyline segments of the distance from query point i,
// computed in an equirectangular frame centered on that point. All variants
// produce bit-identical output. nvert >= 2.
void min_distance_batch(const double* lon_deg, const double* lat_deg, std::size_t npts,
                        const double* vlon_deg, const double* vlat_deg, std::size_t nvert,
                        double* dist_m);

}  // namespace routecheck::kern
