#include "routecheck/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_detail.hpp"

namespace routecheck::kern {

namespace {

bool cpu_has_avx2() {
#ifdef ROUTECHECK_HAVE_AVX2
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Isa pick_initial_isa() {
    if (const char* env = std::getenv("ROUTECHECK_ISA")) {
        const std::string v(env);
        if (v == "scalar") return Isa::Scalar;
        if (v == "avx2" && cpu_has_avx2()) return Isa::Avx2;
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

Isa& current_isa() {
    static Isa isa = pick_initial_isa();
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "?";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

Isa active_isa() { return current_isa(); }

void set_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw std::invalid_argument(std::string("kernel ISA not available: ") + isa_name(isa));
    }
    current_isa() = isa;
}

void min_distance_batch(const double* lon_deg, const double* lat_deg, std::size_t npts,
                        const double* vlon_deg, const double* vlat_deg, std::size_t nvert,
                        double* dist_m) {
    if (nvert < 2) {
        throw std::invalid_argument("min_distance_batch: polyline needs >= 2 vertices");
    }
    switch (current_isa()) {
#ifdef ROUTECHECK_HAVE_AVX2
        case Isa::Avx2:
            detail::min_distance_avx2(lon_deg, lat_deg, npts, vlon_deg, vlat_deg, nvert, dist_m);
            return;
#endif
        default:
            detail::min_distance_scalar(lon_deg, lat_deg, npts, vlon_deg, vlat_deg, nvert, dist_m);
            return;
    }
}

}  // namespace routecheck::kern
