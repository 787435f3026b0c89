#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abscat/vec3.hpp"

namespace abscat::simd {

enum class Backend { scalar, avx2 };

bool avx2_supported();
Backend active_backend();
void set_backend(Backend b);
// Parses "scalar"/"avx2"/"auto"; used by the CLI and the ABSCAT_SIMD env var.
bool set_backend_by_name(const std::string& name);
const char* backend_name(Backend b);

// Structure-of-arrays holder for curve quadrature nodes (and, reusing the
// same layout, for volume quadrature nodes). p is the node position, t the
// tangent (or field value) already scaled by the quadrature weight.
struct CurveNodes {
    std::vector<double> px, py, pz, tx, ty, tz;

    std::size_t size() const { return px.size(); }
    void reserve(std::size_t n) {
        px.reserve(n); py.reserve(n); pz.reserve(n);
        tx.reserve(n); ty.reserve(n); tz.reserve(n);
    }
    void push(const Vec3& p, const Vec3& t) {
        px.push_back(p.x); py.push_back(p.y); pz.push_back(p.z);
        tx.push_back(t.x); ty.push_back(t.y); tz.push_back(t.z);
    }
};

struct KernelTable {
    // sum_i t_i x (x - p_i) / |x - p_i|^3
    void (*biot_savart_sum)(const double* px, const double* py, const double* pz,
                            const double* tx, const double* ty, const double* tz,
                            std::size_t n, const double x[3], double out[3]);
    // sum_i sum_j det[t1_i, t2_j, p1_i - p2_j] / |p1_i - p2_j|^3
    double (*pair_link_sum)(const double* p1x, const double* p1y, const double* p1z,
                            const double* t1x, const double* t1y, const double* t1z, std::size_t n1,
                            const double* p2x, const double* p2y, const double* p2z,
                            const double* t2x, const double* t2y, const double* t2z, std::size_t n2);
    // min_ij |p1_i - p2_j|^2
    double (*min_pair_dist2)(const double* p1x, const double* p1y, const double* p1z, std::size_t n1,
                             const double* p2x, const double* p2y, const double* p2z, std::size_t n2);
};

const KernelTable& kernels(Backend b);
inline const KernelTable& kernels() { return kernels(active_backend()); }

// Convenience wrappers over the active backend.
Vec3 biot_savart_sum(const CurveNodes& c, const Vec3& x);
double pair_link_sum(const CurveNodes& a, const CurveNodes& b);
double min_pair_dist2(const CurveNodes& a, const CurveNodes& b);

} // namespace abscat::simd
