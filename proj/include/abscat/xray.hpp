#pragma once

#include <complex>

#include "abscat/fields.hpp"
#include "abscat/geometry.hpp"

namespace abscat {

struct RayTransformSample {
    Vec3 direction;
    Vec3 transverse_point; // base with the along-ray component removed
    double value = 0.0;
    double est_error = 0.0;
};

struct XrayOptions {
    double tol = 1e-6;
    bool use_exact_route = true; // use the field's exact line integral when present
};

// Line integral of v . A over the full line of `ray`. Adaptive Simpson on a
// core interval plus substitution-transformed tails; the declared decay class
// bounds what the substitution cannot reach.
double xray_a(const PotentialField& A, const Ray& ray, const ObstacleSet& K,
              const XrayOptions& opt = {}, double* est_error = nullptr);

// e^{i a(v, x)}; the quantity the high-velocity limit actually determines.
std::complex<double> phase_factor(const PotentialField& A, const Ray& ray, const ObstacleSet& K,
                                  const XrayOptions& opt = {});

double xray_V(const ScalarPotentialModel& V, const Ray& ray, const ObstacleSet& K,
              const XrayOptions& opt = {}, double* est_error = nullptr);

// Integral of v x B over the line; exact short Gauss rule on the support
// chord for bump models, adaptive quadrature otherwise.
Vec3 xray_transverse_B(const MagneticFieldModel& B, const Ray& ray, const ObstacleSet& K,
                       const XrayOptions& opt = {});

// Gradient of a(v, .) at x extracted from the gauge-invariant phase ratio
// R(x, y) = e^{i (a(x) - a(y))} by central differences of step h:
// (1/i) conj(R) grad R evaluated without unwrapping.
Vec3 grad_a_from_ratio(const PotentialField& A, const Vec3& x, const Vec3& y, const Vec3& v,
                       double h, const ObstacleSet& K, const XrayOptions& opt = {});

RayTransformSample make_sample(const PotentialField& A, const Ray& ray, const ObstacleSet& K,
                               const XrayOptions& opt = {});

} // namespace abscat
