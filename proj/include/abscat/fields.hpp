#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abscat/geometry.hpp"
#include "abscat/simd/kernels.hpp"
#include "abscat/vec3.hpp"

namespace abscat {

// Dimensionless flux (phase in radians) assigned to each torus.
struct FluxAssignment {
    std::vector<double> phi;

    FluxAssignment() = default;
    explicit FluxAssignment(std::vector<double> v) : phi(std::move(v)) {}
    static FluxAssignment zeros(size_t n) { return FluxAssignment(std::vector<double>(n, 0.0)); }
};

// Representative of an angle in (-pi, pi]; ties at pi resolve to +pi.
double wrap_angle(double a);

enum class FieldTag { ZeroExterior, SmoothBump };

// Polynomial bump profile psi(rho) = amplitude * (1 - (rho/R)^2)^4 inside the
// support ball; the field is curl(psi * dir), divergence-free by construction
// and a degree-7 polynomial along any chord of the support.
struct BumpSpec {
    Vec3 center;
    double radius = 1.0;
    double amplitude = 1.0;
    Vec3 dir{0, 0, 1};

    Vec3 field(const Vec3& y) const;
    Vec3 curl_field(const Vec3& y) const;
};

struct MagneticFieldModel {
    FieldTag tag = FieldTag::ZeroExterior;
    std::function<Vec3(const Vec3&)> B;
    std::function<Vec3(const Vec3&)> curl_B;
    double mu = 3.0; // decay exponent, > 2
    std::optional<BumpSpec> bump;

    static MagneticFieldModel zero();
};

MagneticFieldModel make_test_bump_field(const Vec3& center, double radius, double amplitude,
                                        const Vec3& dir = {0, 0, 1},
                                        const ObstacleSet* K = nullptr);

struct RangeClass {
    bool short_range = true;
    double epsilon = 1.0;  // |A| <= C (1+|x|)^{-1-epsilon}
    double constant = 0.0; // the C above, estimated on radial samples
};

struct ScalarPotentialModel {
    std::function<double(const Vec3&)> V;
    double alpha = 2.0; // decay exponent, > 1
    double constant = 0.0;
    // Exact line integral when the model admits one (Gaussian bumps do).
    std::function<double(const Ray&)> line_integral;

    static ScalarPotentialModel zero();
    static ScalarPotentialModel gaussian(const Vec3& center, double sigma, double amplitude);
};

// Evaluable magnetic potential together with its class metadata.
struct PotentialField {
    std::function<Vec3(const Vec3&)> A;
    FluxAssignment flux;
    RangeClass range;
    std::string gauge_tag;
    // Direction function at infinity; empty means identically zero
    // (the short-range case).
    std::function<double(const Vec3&)> lambda_infinity;
    // Optional exact evaluator for the line integral of A . v along a full
    // line; cross-checked against the generic quadrature in the tests.
    std::function<double(const Ray&)> line_integral;
    // Underlying exterior field model when known.
    std::shared_ptr<const MagneticFieldModel> field_model;

    Vec3 operator()(const Vec3& x) const { return A(x); }
};

// Unit-current loop potential G of a torus core circle (Biot-Savart field of
// the core), with cached Gauss-Legendre node sets refined per evaluation point.
class LoopPotential {
public:
    explicit LoopPotential(const Torus& torus);

    Vec3 eval(const Vec3& x) const;
    const Torus& torus() const { return torus_; }

private:
    Torus torus_;
    std::vector<simd::CurveNodes> levels_;
};

// Shared set of loop potentials for an obstacle set.
class LoopPotentialSet {
public:
    explicit LoopPotentialSet(const ObstacleSet& K);
    size_t size() const { return loops_.size(); }
    const LoopPotential& operator[](size_t j) const { return loops_[j]; }

private:
    std::vector<LoopPotential> loops_;
};

// G^{(j)} at x. Convenience wrapper; rebuilds the loop cache, so prefer
// LoopPotential for repeated evaluation.
Vec3 loop_potential(size_t j, const ObstacleSet& K, const Vec3& x);

// Circulation of a vector field over a closed curve, by panel-doubled
// Gauss-Legendre quadrature.
double circulation(const std::function<Vec3(const Vec3&)>& A, const ClosedCurve& curve,
                   double tol = 1e-9);

// A = sum_j phi_j G^{(j)}; vanishing exterior field, fluxes exactly phi.
PotentialField ab_potential(const FluxAssignment& phi, const ObstacleSet& K);

struct CoulombQuadratureSpec {
    int order_per_axis = 24;
    double singular_radius_factor = 0.05; // mask radius as a fraction of the support radius
    double check_tol = 2e-3;              // relative refinement agreement on probe points
};

// Divergence-free potential of a compactly supported field via the
// volume Biot-Savart integral over the bump support.
PotentialField coulomb_potential_from_B(const MagneticFieldModel& B, const ObstacleSet& K,
                                        const CoulombQuadratureSpec& spec = {});

// A1 + sum_j (phi_j - circ_j(A1)) G^{(j)}; restores prescribed circulations.
PotentialField add_flux_correction(const PotentialField& A1, const FluxAssignment& phi,
                                   const ObstacleSet& K);

struct GaugeFunction {
    std::function<double(const Vec3&)> lambda;
    std::function<Vec3(const Vec3&)> grad; // analytic gradient
    bool compact_support = true;
    std::function<double(const Vec3&)> lambda_inf; // empty => 0

    // Smooth compactly supported gauge function c * (1 - |x-c0|^2/R^2)^4.
    static GaugeFunction bump(const Vec3& center, double radius, double amplitude);
};

PotentialField gauge_shift(const PotentialField& A, const GaugeFunction& g);

// A + sum_j 2 pi n_j G^{(j)}; shifts every flux by an integer multiple of 2 pi.
PotentialField add_integer_flux(const PotentialField& A, const std::vector<int>& n,
                                const ObstacleSet& K);

// Largest of |A|(1+|x|)^{1+eps} over log-spaced radii >= r0 in a few fixed
// directions; the constant behind the short-range tail bound.
double estimate_decay_constant(const std::function<Vec3(const Vec3&)>& A, double eps, double r0);

} // namespace abscat
