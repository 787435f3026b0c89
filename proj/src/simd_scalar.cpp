#include <cmath>
#include <cstddef>
#include <limits>

#include "abscat/simd/kernels.hpp"

// Reference kernels. These define the semantics the vector backends must
// reproduce; keep them simple.

namespace abscat::simd::detail {

void biot_savart_sum_scalar(const double* px, const double* py, const double* pz,
                            const double* tx, const double* ty, const double* tz,
                            std::size_t n, const double x[3], double out[3]) {
    double ax = 0.0, ay = 0.0, az = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[0] - px[i];
        double dy = x[1] - py[i];
        double dz = x[2] - pz[i];
        double r2 = dx * dx + dy * dy + dz * dz;
        double inv3 = 1.0 / (r2 * std::sqrt(r2));
        ax += (ty[i] * dz - tz[i] * dy) * inv3;
        ay += (tz[i] * dx - tx[i] * dz) * inv3;
        az += (tx[i] * dy - ty[i] * dx) * inv3;
    }
    out[0] = ax;
    out[1] = ay;
    out[2] = az;
}

double pair_link_sum_scalar(const double* p1x, const double* p1y, const double* p1z,
                            const double* t1x, const double* t1y, const double* t1z, std::size_t n1,
                            const double* p2x, const double* p2y, const double* p2z,
                            const double* t2x, const double* t2y, const double* t2z, std::size_t n2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        const double ax = t1x[i], ay = t1y[i], az = t1z[i];
        const double qx = p1x[i], qy = p1y[i], qz = p1z[i];
        double row = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            double dx = qx - p2x[j];
            double dy = qy - p2y[j];
            double dz = qz - p2z[j];
            double r2 = dx * dx + dy * dy + dz * dz;
            double inv3 = 1.0 / (r2 * std::sqrt(r2));
            // det[t1, t2, d]
            double cx = t2y[j] * dz - t2z[j] * dy;
            double cy = t2z[j] * dx - t2x[j] * dz;
            double cz = t2x[j] * dy - t2y[j] * dx;
            row += (ax * cx + ay * cy + az * cz) * inv3;
        }
        acc += row;
    }
    return acc;
}

double min_pair_dist2_scalar(const double* p1x, const double* p1y, const double* p1z, std::size_t n1,
                             const double* p2x, const double* p2y, const double* p2z, std::size_t n2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            double dx = p1x[i] - p2x[j];
            double dy = p1y[i] - p2y[j];
            double dz = p1z[i] - p2z[j];
            double r2 = dx * dx + dy * dy + dz * dz;
            if (r2 < best) best = r2;
        }
    }
    return best;
}

} // namespace abscat::simd::detail
