#include "abscat/xray.hpp"

#include <cmath>

#include "abscat/errors.hpp"
#include "abscat/quadrature.hpp"

namespace abscat {

namespace {

// Improper line integral of a scalar integrand with declared power decay:
// core interval by adaptive Simpson, tails by the s/(1-s) substitution. The
// substitution covers the half-lines up to tau ~ 1e9 * core; beyond that the
// analytic bound from (constant, epsilon) is charged to the error estimate.
double improper_line_integral(const std::function<double(double)>& f, double core_halfwidth,
                              double decay_constant, double decay_eps, double tol,
                              double* est_error) {
    double T0 = core_halfwidth;
    auto core = quad::adaptive_simpson(f, -T0, T0, 0.5 * tol);
    auto right = quad::adaptive_right_tail(f, T0, 0.2 * tol);
    auto left = quad::adaptive_right_tail([&](double t) { return f(-t); }, T0, 0.2 * tol);
    double truncated = 0.0;
    if (decay_constant > 0.0) {
        double far = T0 + 1e9;
        truncated = 2.0 * decay_constant / decay_eps * std::pow(1.0 + far, -decay_eps);
    }
    if (est_error) *est_error = core.est_error + right.est_error + left.est_error + truncated;
    return core.value + right.value + left.value;
}

double core_halfwidth_for(const Ray& ray, const ObstacleSet& K, double field_scale) {
    double b = std::abs(dot(ray.base, ray.dir));
    return std::max({4.0 * (K.enclosing_radius + b), 4.0 * field_scale, 8.0});
}

} // namespace

double xray_a(const PotentialField& A, const Ray& ray, const ObstacleSet& K,
              const XrayOptions& opt, double* est_error) {
    if (!ray_in_exterior(ray, K)) throw RayBlocked("x-ray of A");
    if (opt.use_exact_route && A.line_integral) {
        if (est_error) *est_error = 1e-9;
        return A.line_integral(ray);
    }
    if (!A.range.short_range)
        throw TailBoundUnavailable("long-range potential without an exact line integral");
    auto f = [&](double t) { return dot(A.A(ray.at(t)), ray.dir); };
    double scale = 1.0;
    if (A.field_model && A.field_model->bump)
        scale = A.field_model->bump->center.norm() + A.field_model->bump->radius;
    return improper_line_integral(f, core_halfwidth_for(ray, K, scale), A.range.constant,
                                  A.range.epsilon, opt.tol, est_error);
}

std::complex<double> phase_factor(const PotentialField& A, const Ray& ray, const ObstacleSet& K,
                                  const XrayOptions& opt) {
    double a = xray_a(A, ray, K, opt);
    return std::polar(1.0, a);
}

double xray_V(const ScalarPotentialModel& V, const Ray& ray, const ObstacleSet& K,
              const XrayOptions& opt, double* est_error) {
    if (!ray_in_exterior(ray, K)) throw RayBlocked("x-ray of V");
    if (opt.use_exact_route && V.line_integral) {
        if (est_error) *est_error = 1e-9;
        return V.line_integral(ray);
    }
    if (!(V.alpha > 1.0)) throw TailBoundUnavailable("scalar potential decay exponent <= 1");
    auto f = [&](double t) { return V.V(ray.at(t)); };
    return improper_line_integral(f, core_halfwidth_for(ray, K, 1.0), V.constant, V.alpha - 1.0,
                                  opt.tol, est_error);
}

Vec3 xray_transverse_B(const MagneticFieldModel& B, const Ray& ray, const ObstacleSet& K,
                       const XrayOptions& opt) {
    if (!ray_in_exterior(ray, K)) throw RayBlocked("x-ray of B");
    if (B.tag == FieldTag::ZeroExterior) return {};
    if (B.bump && opt.use_exact_route) {
        // v x B is a degree-7 polynomial on the support chord.
        const BumpSpec& bump = *B.bump;
        double b = dot(ray.base - bump.center, ray.dir);
        double c2 = (ray.base - bump.center).norm2() - bump.radius * bump.radius;
        double disc = b * b - c2;
        if (disc <= 0.0) return {};
        double s0 = -b - std::sqrt(disc), s1 = -b + std::sqrt(disc);
        const auto& rule = quad::gauss_legendre(6);
        double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
        Vec3 acc{};
        for (int i = 0; i < 6; ++i) {
            Vec3 y = ray.at(mid + half * rule.nodes[i]);
            acc += cross(ray.dir, bump.field(y)) * rule.weights[i];
        }
        return acc * half;
    }
    Vec3 out;
    double hw = core_halfwidth_for(ray, K, 1.0);
    auto component = [&](int k) {
        auto f = [&, k](double t) {
            Vec3 w = cross(ray.dir, B.B(ray.at(t)));
            return k == 0 ? w.x : (k == 1 ? w.y : w.z);
        };
        return improper_line_integral(f, hw, 1.0, B.mu - 1.0, opt.tol, nullptr);
    };
    out.x = component(0);
    out.y = component(1);
    out.z = component(2);
    return out;
}

Vec3 grad_a_from_ratio(const PotentialField& A, const Vec3& x, const Vec3& y, const Vec3& v,
                       double h, const ObstacleSet& K, const XrayOptions& opt) {
    std::complex<double> ref = std::conj(phase_factor(A, Ray(y, v), K, opt));
    auto ratio = [&](const Vec3& p) { return phase_factor(A, Ray(p, v), K, opt) * ref; };
    Vec3 g;
    const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double* comp[3] = {&g.x, &g.y, &g.z};
    for (int k = 0; k < 3; ++k) {
        std::complex<double> rp = ratio(x + axes[k] * h);
        std::complex<double> rm = ratio(x - axes[k] * h);
        *comp[k] = std::arg(rp * std::conj(rm)) / (2.0 * h);
    }
    return g;
}

RayTransformSample make_sample(const PotentialField& A, const Ray& ray, const ObstacleSet& K,
                               const XrayOptions& opt) {
    RayTransformSample s;
    s.direction = ray.dir;
    s.transverse_point = ray.base - ray.dir * dot(ray.base, ray.dir);
    s.value = xray_a(A, ray, K, opt, &s.est_error);
    return s;
}

} // namespace abscat
