// AVX2 variant of the min-distance kernel: four query points per iteration,
// mirroring the scalar operation sequence per lane (mul/add only, no FMA),
// so output is bit-identical to the scalar reference.

#include "kernels_detail.hpp"

#if defined(ROUTECHECK_HAVE_AVX2) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace routecheck::kern::detail {

namespace {

// IEEE negation, matching scalar unary minus exactly (including -0.0).
inline __m256d negate(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_xor_pd(v, sign);
}

}  // namespace

void min_distance_avx2(const double* lon_deg, const double* lat_deg, std::size_t npts,
                       const double* vlon_deg, const double* vlat_deg, std::size_t nvert,
                       double* dist_m) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d ky = _mm256_set1_pd(kMetersPerDegree);
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

    std::size_t i = 0;
    for (; i + 4 <= npts; i += 4) {
        alignas(32) double kx_buf[4];
        for (int lane = 0; lane < 4; ++lane) {
            kx_buf[lane] = kMetersPerDegree * std::cos(lat_deg[i + lane] * kDegToRad);
        }
        const __m256d kx = _mm256_load_pd(kx_buf);
        const __m256d plon = _mm256_loadu_pd(lon_deg + i);
        const __m256d plat = _mm256_loadu_pd(lat_deg + i);

        __m256d best = inf;
        for (std::size_t j = 0; j + 1 < nvert; ++j) {
            const __m256d ax =
                _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(vlon_deg[j]), plon), kx);
            const __m256d ay =
                _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(vlat_deg[j]), plat), ky);
            const __m256d bx =
                _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(vlon_deg[j + 1]), plon), kx);
            const __m256d by =
                _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(vlat_deg[j + 1]), plat), ky);

            const __m256d dx = _mm256_sub_pd(bx, ax);
            const __m256d dy = _mm256_sub_pd(by, ay);
            const __m256d len2 =
                _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
            const __m256d dot =
                _mm256_add_pd(_mm256_mul_pd(ax, dx), _mm256_mul_pd(ay, dy));

            __m256d t = _mm256_div_pd(negate(dot), len2);
            t = _mm256_blendv_pd(t, zero, _mm256_cmp_pd(t, zero, _CMP_LT_OQ));
            t = _mm256_blendv_pd(t, one, _mm256_cmp_pd(t, one, _CMP_GT_OQ));

            const __m256d cx = _mm256_add_pd(ax, _mm256_mul_pd(t, dx));
            const __m256d cy = _mm256_add_pd(ay, _mm256_mul_pd(t, dy));
            const __m256d d2_seg =
                _mm256_add_pd(_mm256_mul_pd(cx, cx), _mm256_mul_pd(cy, cy));
            const __m256d d2_end =
                _mm256_add_pd(_mm256_mul_pd(ax, ax), _mm256_mul_pd(ay, ay));

            const __m256d d2 =
                _mm256_blendv_pd(d2_end, d2_seg, _mm256_cmp_pd(len2, zero, _CMP_GT_OQ));
            best = _mm256_blendv_pd(best, d2, _mm256_cmp_pd(d2, best, _CMP_LT_OQ));
        }
        _mm256_storeu_pd(dist_m + i, _mm256_sqrt_pd(best));
    }

    for (; i < npts; ++i) {
        dist_m[i] = point_min_distance(lon_deg[i], lat_deg[i], vlon_deg, vlat_deg, nvert);
    }
}

}  // namespace routecheck::kern::detail

#endif  // ROUTECHECK_HAVE_AVX2 && __AVX2__
