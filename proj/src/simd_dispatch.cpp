#include <atomic>
#include <cstdlib>

#include "abscat/simd/kernels.hpp"

namespace abscat::simd {

namespace detail {

void biot_savart_sum_scalar(const double*, const double*, const double*,
                            const double*, const double*, const double*,
                            std::size_t, const double[3], double[3]);
double pair_link_sum_scalar(const double*, const double*, const double*,
                            const double*, const double*, const double*, std::size_t,
                            const double*, const double*, const double*,
                            const double*, const double*, const double*, std::size_t);
double min_pair_dist2_scalar(const double*, const double*, const double*, std::size_t,
                             const double*, const double*, const double*, std::size_t);

#if defined(__x86_64__) || defined(__i386__)
void biot_savart_sum_avx2(const double*, const double*, const double*,
                          const double*, const double*, const double*,
                          std::size_t, const double[3], double[3]);
double pair_link_sum_avx2(const double*, const double*, const double*,
                          const double*, const double*, const double*, std::size_t,
                          const double*, const double*, const double*,
                          const double*, const double*, const double*, std::size_t);
double min_pair_dist2_avx2(const double*, const double*, const double*, std::size_t,
                           const double*, const double*, const double*, std::size_t);
#endif

} // namespace detail

namespace {

const KernelTable scalar_table = {
    detail::biot_savart_sum_scalar,
    detail::pair_link_sum_scalar,
    detail::min_pair_dist2_scalar,
};

#if defined(__x86_64__) || defined(__i386__)
const KernelTable avx2_table = {
    detail::biot_savart_sum_avx2,
    detail::pair_link_sum_avx2,
    detail::min_pair_dist2_avx2,
};
#endif

std::atomic<Backend> g_backend{[] {
    if (const char* env = std::getenv("ABSCAT_SIMD")) {
        std::string s(env);
        if (s == "scalar") return Backend::scalar;
        if (s == "avx2" && avx2_supported()) return Backend::avx2;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}()};

} // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported()) b = Backend::scalar;
    g_backend.store(b, std::memory_order_relaxed);
}

bool set_backend_by_name(const std::string& name) {
    if (name == "scalar") {
        set_backend(Backend::scalar);
        return true;
    }
    if (name == "avx2") {
        if (!avx2_supported()) return false;
        set_backend(Backend::avx2);
        return true;
    }
    if (name == "auto") {
        set_backend(avx2_supported() ? Backend::avx2 : Backend::scalar);
        return true;
    }
    return false;
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& kernels(Backend b) {
#if defined(__x86_64__) || defined(__i386__)
    if (b == Backend::avx2) return avx2_table;
#else
    (void)b;
#endif
    return scalar_table;
}

Vec3 biot_savart_sum(const CurveNodes& c, const Vec3& x) {
    double xp[3] = {x.x, x.y, x.z};
    double out[3];
    kernels().biot_savart_sum(c.px.data(), c.py.data(), c.pz.data(),
                              c.tx.data(), c.ty.data(), c.tz.data(), c.size(), xp, out);
    return {out[0], out[1], out[2]};
}

double pair_link_sum(const CurveNodes& a, const CurveNodes& b) {
    return kernels().pair_link_sum(a.px.data(), a.py.data(), a.pz.data(),
                                   a.tx.data(), a.ty.data(), a.tz.data(), a.size(),
                                   b.px.data(), b.py.data(), b.pz.data(),
                                   b.tx.data(), b.ty.data(), b.tz.data(), b.size());
}

double min_pair_dist2(const CurveNodes& a, const CurveNodes& b) {
    return kernels().min_pair_dist2(a.px.data(), a.py.data(), a.pz.data(), a.size(),
                                    b.px.data(), b.py.data(), b.pz.data(), b.size());
}

} // namespace abscat::simd
