#include <cstddef>
#include <limits>

#include "abscat/simd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

// AVX2/FMA variants of the inner-loop kernels. Compiled with per-function
// target attributes so the rest of the build stays generic; selected at
// runtime only when cpuid reports avx2+fma.

namespace abscat::simd::detail {

#define ABSCAT_AVX2 __attribute__((target("avx2,fma")))

namespace {

ABSCAT_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

ABSCAT_AVX2
void biot_savart_sum_avx2(const double* px, const double* py, const double* pz,
                          const double* tx, const double* ty, const double* tz,
                          std::size_t n, const double x[3], double out[3]) {
    const __m256d X = _mm256_set1_pd(x[0]);
    const __m256d Y = _mm256_set1_pd(x[1]);
    const __m256d Z = _mm256_set1_pd(x[2]);
    __m256d accx = _mm256_setzero_pd();
    __m256d accy = _mm256_setzero_pd();
    __m256d accz = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(X, _mm256_loadu_pd(px + i));
        __m256d dy = _mm256_sub_pd(Y, _mm256_loadu_pd(py + i));
        __m256d dz = _mm256_sub_pd(Z, _mm256_loadu_pd(pz + i));
        __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
        __m256d inv3 = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(r2, _mm256_sqrt_pd(r2)));
        __m256d ax = _mm256_loadu_pd(tx + i);
        __m256d ay = _mm256_loadu_pd(ty + i);
        __m256d az = _mm256_loadu_pd(tz + i);
        __m256d cx = _mm256_fmsub_pd(ay, dz, _mm256_mul_pd(az, dy));
        __m256d cy = _mm256_fmsub_pd(az, dx, _mm256_mul_pd(ax, dz));
        __m256d cz = _mm256_fmsub_pd(ax, dy, _mm256_mul_pd(ay, dx));
        accx = _mm256_fmadd_pd(cx, inv3, accx);
        accy = _mm256_fmadd_pd(cy, inv3, accy);
        accz = _mm256_fmadd_pd(cz, inv3, accz);
    }
    double ox = hsum(accx), oy = hsum(accy), oz = hsum(accz);
    for (; i < n; ++i) {
        double dx = x[0] - px[i], dy = x[1] - py[i], dz = x[2] - pz[i];
        double r2 = dx * dx + dy * dy + dz * dz;
        double inv3 = 1.0 / (r2 * __builtin_sqrt(r2));
        ox += (ty[i] * dz - tz[i] * dy) * inv3;
        oy += (tz[i] * dx - tx[i] * dz) * inv3;
        oz += (tx[i] * dy - ty[i] * dx) * inv3;
    }
    out[0] = ox;
    out[1] = oy;
    out[2] = oz;
}

ABSCAT_AVX2
double pair_link_sum_avx2(const double* p1x, const double* p1y, const double* p1z,
                          const double* t1x, const double* t1y, const double* t1z, std::size_t n1,
                          const double* p2x, const double* p2y, const double* p2z,
                          const double* t2x, const double* t2y, const double* t2z, std::size_t n2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        const __m256d ax = _mm256_set1_pd(t1x[i]);
        const __m256d ay = _mm256_set1_pd(t1y[i]);
        const __m256d az = _mm256_set1_pd(t1z[i]);
        const __m256d qx = _mm256_set1_pd(p1x[i]);
        const __m256d qy = _mm256_set1_pd(p1y[i]);
        const __m256d qz = _mm256_set1_pd(p1z[i]);
        __m256d rowv = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= n2; j += 4) {
            __m256d dx = _mm256_sub_pd(qx, _mm256_loadu_pd(p2x + j));
            __m256d dy = _mm256_sub_pd(qy, _mm256_loadu_pd(p2y + j));
            __m256d dz = _mm256_sub_pd(qz, _mm256_loadu_pd(p2z + j));
            __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
            __m256d inv3 = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(r2, _mm256_sqrt_pd(r2)));
            __m256d bx = _mm256_loadu_pd(t2x + j);
            __m256d by = _mm256_loadu_pd(t2y + j);
            __m256d bz = _mm256_loadu_pd(t2z + j);
            __m256d cx = _mm256_fmsub_pd(by, dz, _mm256_mul_pd(bz, dy));
            __m256d cy = _mm256_fmsub_pd(bz, dx, _mm256_mul_pd(bx, dz));
            __m256d cz = _mm256_fmsub_pd(bx, dy, _mm256_mul_pd(by, dx));
            __m256d det = _mm256_fmadd_pd(ax, cx, _mm256_fmadd_pd(ay, cy, _mm256_mul_pd(az, cz)));
            rowv = _mm256_fmadd_pd(det, inv3, rowv);
        }
        double row = hsum(rowv);
        for (; j < n2; ++j) {
            double dx = p1x[i] - p2x[j];
            double dy = p1y[i] - p2y[j];
            double dz = p1z[i] - p2z[j];
            double r2 = dx * dx + dy * dy + dz * dz;
            double inv3 = 1.0 / (r2 * __builtin_sqrt(r2));
            double cx = t2y[j] * dz - t2z[j] * dy;
            double cy = t2z[j] * dx - t2x[j] * dz;
            double cz = t2x[j] * dy - t2y[j] * dx;
            row += (t1x[i] * cx + t1y[i] * cy + t1z[i] * cz) * inv3;
        }
        acc += row;
    }
    return acc;
}

ABSCAT_AVX2
double min_pair_dist2_avx2(const double* p1x, const double* p1y, const double* p1z, std::size_t n1,
                           const double* p2x, const double* p2y, const double* p2z, std::size_t n2) {
    __m256d bestv = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
        const __m256d qx = _mm256_set1_pd(p1x[i]);
        const __m256d qy = _mm256_set1_pd(p1y[i]);
        const __m256d qz = _mm256_set1_pd(p1z[i]);
        std::size_t j = 0;
        for (; j + 4 <= n2; j += 4) {
            __m256d dx = _mm256_sub_pd(qx, _mm256_loadu_pd(p2x + j));
            __m256d dy = _mm256_sub_pd(qy, _mm256_loadu_pd(p2y + j));
            __m256d dz = _mm256_sub_pd(qz, _mm256_loadu_pd(p2z + j));
            __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
            bestv = _mm256_min_pd(bestv, r2);
        }
        for (; j < n2; ++j) {
            double dx = p1x[i] - p2x[j];
            double dy = p1y[i] - p2y[j];
            double dz = p1z[i] - p2z[j];
            double r2 = dx * dx + dy * dy + dz * dz;
            if (r2 < best) best = r2;
        }
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, bestv);
    for (double v : lanes)
        if (v < best) best = v;
    return best;
}

} // namespace abscat::simd::detail

#endif // x86
