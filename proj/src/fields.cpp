#include "abscat/fields.hpp"

#include <algorithm>
#include <cmath>

#include "abscat/errors.hpp"
#include "abscat/quadrature.hpp"

namespace abscat {

double wrap_angle(double a) {
    double y = a - 2.0 * M_PI * std::ceil(a / (2.0 * M_PI) - 0.5);
    if (y <= -M_PI) y = M_PI; // ties toward +pi
    return y;
}

// ---------------------------------------------------------------------------
// Bump field

namespace {

// psi(rho) = A (1 - rho^2/R^2)^4,  g(q) := psi'(rho)/rho as a function of
// q = rho^2:  g(q) = -8 A / R^2 (1 - q/R^2)^3.
inline double bump_g(double q, double R, double amp) {
    double u = 1.0 - q / (R * R);
    return -8.0 * amp / (R * R) * u * u * u;
}

inline double bump_g_prime(double q, double R, double amp) {
    double u = 1.0 - q / (R * R);
    return 24.0 * amp / (R * R * R * R) * u * u;
}

} // namespace

Vec3 BumpSpec::field(const Vec3& y) const {
    Vec3 u = y - center;
    double q = u.norm2();
    if (q >= radius * radius) return {};
    return cross(u, dir) * bump_g(q, radius, amplitude);
}

Vec3 BumpSpec::curl_field(const Vec3& y) const {
    Vec3 u = y - center;
    double q = u.norm2();
    if (q >= radius * radius) return {};
    double g = bump_g(q, radius, amplitude);
    double gp = bump_g_prime(q, radius, amplitude);
    return (u * dot(dir, u) - dir * q) * (2.0 * gp) - dir * (2.0 * g);
}

MagneticFieldModel MagneticFieldModel::zero() {
    MagneticFieldModel m;
    m.tag = FieldTag::ZeroExterior;
    m.B = [](const Vec3&) { return Vec3{}; };
    m.curl_B = [](const Vec3&) { return Vec3{}; };
    m.mu = 10.0;
    return m;
}

MagneticFieldModel make_test_bump_field(const Vec3& center, double radius, double amplitude,
                                        const Vec3& dir, const ObstacleSet* K) {
    if (!(radius > 0.0)) throw ConfigError("bump radius must be positive");
    if (K) {
        for (const auto& t : K->tori)
            if (t.core_distance(center) - t.minor < radius)
                throw SupportOverlapsObstacle("bump support meets a torus");
        for (const auto& b : K->balls)
            if ((b.center - center).norm() < b.radius + radius)
                throw SupportOverlapsObstacle("bump support meets a ball");
    }
    BumpSpec spec{center, radius, amplitude, normalized(dir)};
    MagneticFieldModel m;
    m.tag = FieldTag::SmoothBump;
    m.bump = spec;
    m.B = [spec](const Vec3& y) { return spec.field(y); };
    m.curl_B = [spec](const Vec3& y) { return spec.curl_field(y); };
    m.mu = 10.0; // compactly supported; any exponent bounds the tail
    return m;
}

ScalarPotentialModel ScalarPotentialModel::zero() {
    ScalarPotentialModel m;
    m.V = [](const Vec3&) { return 0.0; };
    m.alpha = 10.0;
    m.constant = 0.0;
    m.line_integral = [](const Ray&) { return 0.0; };
    return m;
}

ScalarPotentialModel ScalarPotentialModel::gaussian(const Vec3& center, double sigma, double amplitude) {
    ScalarPotentialModel m;
    m.V = [=](const Vec3& x) {
        double q = (x - center).norm2();
        return amplitude * std::exp(-0.5 * q / (sigma * sigma));
    };
    m.alpha = 10.0;
    m.constant = std::abs(amplitude);
    m.line_integral = [=](const Ray& ray) {
        double d2 = cross(center - ray.base, ray.dir).norm2();
        return amplitude * std::sqrt(2.0 * M_PI) * sigma * std::exp(-0.5 * d2 / (sigma * sigma));
    };
    return m;
}

// ---------------------------------------------------------------------------
// Loop potential

namespace {
constexpr int kLoopMaxLevel = 7;
constexpr double kLoopRelTol = 1e-10;
} // namespace

LoopPotential::LoopPotential(const Torus& torus) : torus_(torus) {
    torus_.validate();
    ClosedCurve core = torus_.core_circle();
    levels_.reserve(kLoopMaxLevel + 1);
    for (int lvl = 0; lvl <= kLoopMaxLevel; ++lvl) levels_.push_back(core.quadrature_nodes(lvl));
}

Vec3 LoopPotential::eval(const Vec3& x) const {
    double d = torus_.core_distance(x);
    if (d < 1e-9) throw OnCurve("loop potential evaluated on the core circle");
    // Node spacing must resolve the pole at complex angle ~ d/major.
    double ratio = 2.0 * M_PI * torus_.major / std::max(d, 1e-9 * torus_.major);
    int start = 0;
    while (start < kLoopMaxLevel && (64 << start) < ratio) ++start;
    Vec3 prev = simd::biot_savart_sum(levels_[start], x) * (1.0 / (4.0 * M_PI));
    for (int lvl = start + 1; lvl <= kLoopMaxLevel; ++lvl) {
        Vec3 cur = simd::biot_savart_sum(levels_[lvl], x) * (1.0 / (4.0 * M_PI));
        if ((cur - prev).norm() <= kLoopRelTol * (cur.norm() + 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

LoopPotentialSet::LoopPotentialSet(const ObstacleSet& K) {
    loops_.reserve(K.tori.size());
    for (const auto& t : K.tori) loops_.emplace_back(t);
}

Vec3 loop_potential(size_t j, const ObstacleSet& K, const Vec3& x) {
    if (j >= K.tori.size()) throw ConfigError("loop potential index out of range");
    return LoopPotential(K.tori[j]).eval(x);
}

double circulation(const std::function<Vec3(const Vec3&)>& A, const ClosedCurve& curve, double tol) {
    double prev = 0.0;
    for (int level = 0;; ++level) {
        simd::CurveNodes nodes = curve.quadrature_nodes(level);
        std::vector<double> terms(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            Vec3 a = A({nodes.px[i], nodes.py[i], nodes.pz[i]});
            terms[i] = a.x * nodes.tx[i] + a.y * nodes.ty[i] + a.z * nodes.tz[i];
        }
        double val = quad::pairwise_sum(terms);
        if (level > 0 && std::abs(val - prev) <= tol) return val;
        if (level == 5) {
            if (std::abs(val - prev) > 10.0 * tol)
                throw QuadratureFailure("circulation did not settle");
            return val;
        }
        prev = val;
    }
}

double estimate_decay_constant(const std::function<Vec3(const Vec3&)>& A, double eps, double r0) {
    static const Vec3 dirs[] = {
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
        normalized({1, 1, 1}), normalized({-1, 2, 0.5}), normalized({0.3, -1, 1})};
    double c = 0.0;
    for (int k = 0; k <= 10; ++k) {
        double r = r0 * std::pow(2.0, k);
        for (const Vec3& d : dirs) {
            double mag = A(d * r).norm();
            c = std::max(c, mag * std::pow(1.0 + r, 1.0 + eps));
        }
    }
    return 2.0 * c; // safety margin for directions between the samples
}

// ---------------------------------------------------------------------------
// Aharonov-Bohm potential

PotentialField ab_potential(const FluxAssignment& phi, const ObstacleSet& K) {
    if (phi.phi.size() != K.tori.size())
        throw ConfigError("flux assignment size does not match torus count");
    auto loops = std::make_shared<LoopPotentialSet>(K);
    auto coeff = std::make_shared<std::vector<double>>(phi.phi);

    PotentialField f;
    f.A = [loops, coeff](const Vec3& x) {
        Vec3 a{};
        for (size_t j = 0; j < loops->size(); ++j) {
            if ((*coeff)[j] == 0.0) continue;
            a += (*loops)[j].eval(x) * (*coeff)[j];
        }
        return a;
    };
    f.flux = phi;
    f.range.short_range = true;
    f.range.epsilon = 1.0;
    double r0 = 2.0 * std::max(K.enclosing_radius, 1.0);
    f.range.constant = estimate_decay_constant(f.A, f.range.epsilon, r0);
    f.gauge_tag = "ab-loop-sum";
    return f;
}

// ---------------------------------------------------------------------------
// Coulomb potential of a compactly supported field

namespace {

// C1 transition used to blend out volume nodes near the evaluation point.
inline double near_mask(double s, double rho0) {
    double u = s / rho0;
    if (u >= 1.0) return 1.0;
    if (u <= 0.5) return 0.0;
    double t = (u - 0.5) / 0.5;
    return t * t * (3.0 - 2.0 * t);
}

struct CoulombData {
    simd::CurveNodes nodes; // position + weight * B
    BumpSpec bump;
    double rho0;
    double node_spacing;
};

Vec3 coulomb_eval(const CoulombData& d, const Vec3& x) {
    Vec3 raw = simd::biot_savart_sum(d.nodes, x);
    Vec3 a = raw * (1.0 / (4.0 * M_PI));

    double dist_to_support = (x - d.bump.center).norm() - d.bump.radius;
    if (dist_to_support > d.rho0) return a;

    // Remove the blended-out part of the regular sum and add the polar
    // integral of the excluded ball, which is smooth
    // ((x-y)/|x-y|^3 dy -> n dS in polar coordinates about x).
    Vec3 correction{};
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        Vec3 p{d.nodes.px[i], d.nodes.py[i], d.nodes.pz[i]};
        double s = (x - p).norm();
        if (s >= d.rho0) continue;
        double m = near_mask(s, d.rho0);
        Vec3 t{d.nodes.tx[i], d.nodes.ty[i], d.nodes.tz[i]};
        Vec3 q = x - p;
        double r3 = s * s * s;
        correction -= cross(t, q) * ((1.0 - m) / r3);
    }

    const auto& radial = quad::gauss_legendre(8);
    const auto& polar = quad::gauss_legendre(8);
    const int nphi = 16;
    Vec3 ball{};
    for (int ir = 0; ir < 8; ++ir) {
        double s = 0.5 * d.rho0 * (1.0 + radial.nodes[ir]);
        double ws = 0.5 * d.rho0 * radial.weights[ir] * (1.0 - near_mask(s, d.rho0));
        if (ws == 0.0) continue;
        for (int ic = 0; ic < 8; ++ic) {
            double ct = polar.nodes[ic];
            double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            double wt = polar.weights[ic];
            for (int ip = 0; ip < nphi; ++ip) {
                double ph = 2.0 * M_PI * (ip + 0.5) / nphi;
                Vec3 n{st * std::cos(ph), st * std::sin(ph), ct};
                Vec3 By = d.bump.field(x - n * s);
                ball += cross(By, n) * (ws * wt * (2.0 * M_PI / nphi));
            }
        }
    }
    return a + (correction + ball) * (1.0 / (4.0 * M_PI));
}

} // namespace

PotentialField coulomb_potential_from_B(const MagneticFieldModel& B, const ObstacleSet& K,
                                        const CoulombQuadratureSpec& spec) {
    if (B.tag == FieldTag::ZeroExterior) {
        PotentialField f;
        f.A = [](const Vec3&) { return Vec3{}; };
        f.flux = FluxAssignment::zeros(K.tori.size());
        f.range = {true, 1.0, 0.0};
        f.gauge_tag = "coulomb-zero";
        f.lambda_infinity = nullptr;
        f.line_integral = [](const Ray&) { return 0.0; };
        f.field_model = std::make_shared<MagneticFieldModel>(B);
        return f;
    }
    if (!B.bump) throw ConfigError("coulomb potential needs a compactly supported bump model");

    auto build = [&](int order) {
        auto data = std::make_shared<CoulombData>();
        data->bump = *B.bump;
        const auto& rule = quad::gauss_legendre(order);
        double R = B.bump->radius;
        Vec3 c = B.bump->center;
        data->node_spacing = 2.0 * R / order;
        data->rho0 = std::max(spec.singular_radius_factor * R, 3.0 * data->node_spacing);
        data->nodes.reserve(order * order * order / 2);
        for (int i = 0; i < order; ++i) {
            double x = c.x + R * rule.nodes[i];
            double wx = R * rule.weights[i];
            for (int j = 0; j < order; ++j) {
                double y = c.y + R * rule.nodes[j];
                double wy = R * rule.weights[j];
                for (int k = 0; k < order; ++k) {
                    double z = c.z + R * rule.nodes[k];
                    double wz = R * rule.weights[k];
                    Vec3 p{x, y, z};
                    Vec3 Bv = B.B(p);
                    if (Bv.norm2() == 0.0) continue;
                    data->nodes.push(p, Bv * (wx * wy * wz));
                }
            }
        }
        return data;
    };

    auto data = build(spec.order_per_axis);
    auto fine = build(spec.order_per_axis + 8);
    // Refinement agreement on probe points around the support.
    double scale = 0.0;
    for (const Vec3& probe : {B.bump->center + Vec3{B.bump->radius * 0.4, 0.1, -0.2},
                              B.bump->center + Vec3{0, -B.bump->radius * 1.3, 0.3},
                              B.bump->center + Vec3{B.bump->radius * 2.4, 0.4, 1.0}}) {
        Vec3 va = coulomb_eval(*data, probe);
        Vec3 vb = coulomb_eval(*fine, probe);
        scale = std::max(scale, vb.norm());
        if ((va - vb).norm() > spec.check_tol * std::max(scale, 1e-12))
            throw QuadratureFailure("volume quadrature refinement disagreement");
    }

    PotentialField f;
    f.A = [data](const Vec3& x) { return coulomb_eval(*data, x); };
    f.flux = FluxAssignment::zeros(K.tori.size());
    f.range.short_range = true;
    f.range.epsilon = 1.0;
    double r0 = 2.0 * std::max({K.enclosing_radius, B.bump->center.norm() + B.bump->radius, 1.0});
    f.range.constant = estimate_decay_constant(f.A, f.range.epsilon, r0);
    f.gauge_tag = "coulomb";
    f.field_model = std::make_shared<MagneticFieldModel>(B);

    // Exact line integral: integrate the transverse-field line integral
    // sideways from infinity, where a vanishes. The integrand along the
    // support chord is polynomial, so a short Gauss rule per chord is exact.
    BumpSpec bump = *B.bump;
    f.line_integral = [bump](const Ray& ray) {
        Vec3 m = any_orthogonal(ray.dir);
        auto w_dot_m = [&](double t) {
            Vec3 base = ray.base + m * t;
            // chord of the support ball along dir
            double b = dot(base - bump.center, ray.dir);
            double c2 = (base - bump.center).norm2() - bump.radius * bump.radius;
            double disc = b * b - c2;
            if (disc <= 0.0) return 0.0;
            double s0 = -b - std::sqrt(disc), s1 = -b + std::sqrt(disc);
            const auto& rule = quad::gauss_legendre(6);
            double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
            double acc = 0.0;
            for (int i = 0; i < 6; ++i) {
                Vec3 y = base + ray.dir * (mid + half * rule.nodes[i]);
                acc += rule.weights[i] * dot(m, cross(ray.dir, bump.field(y)));
            }
            return acc * half;
        };
        auto res = quad::adaptive_right_tail(w_dot_m, 0.0, 1e-10);
        return -res.value;
    };
    return f;
}

// ---------------------------------------------------------------------------
// Flux surgery and gauge transformations

PotentialField add_flux_correction(const PotentialField& A1, const FluxAssignment& phi,
                                   const ObstacleSet& K) {
    if (phi.phi.size() != K.tori.size())
        throw ConfigError("flux assignment size does not match torus count");
    auto loops = std::make_shared<LoopPotentialSet>(K);
    auto coeff = std::make_shared<std::vector<double>>(K.tori.size(), 0.0);
    for (size_t j = 0; j < K.tori.size(); ++j) {
        double circ = circulation(A1.A, K.tori[j].reference_loop());
        (*coeff)[j] = phi.phi[j] - circ;
    }
    auto base = A1.A;
    PotentialField f;
    f.A = [base, loops, coeff](const Vec3& x) {
        Vec3 a = base(x);
        for (size_t j = 0; j < loops->size(); ++j)
            if ((*coeff)[j] != 0.0) a += (*loops)[j].eval(x) * (*coeff)[j];
        return a;
    };
    f.flux = phi;
    f.range = A1.range;
    double r0 = 2.0 * std::max(K.enclosing_radius, 1.0);
    f.range.constant = estimate_decay_constant(f.A, f.range.epsilon, r0);
    f.gauge_tag = A1.gauge_tag + "+flux-correction";
    f.lambda_infinity = A1.lambda_infinity;
    f.field_model = A1.field_model;
    return f;
}

GaugeFunction GaugeFunction::bump(const Vec3& center, double radius, double amplitude) {
    GaugeFunction g;
    g.compact_support = true;
    g.lambda = [=](const Vec3& x) {
        double q = (x - center).norm2() / (radius * radius);
        if (q >= 1.0) return 0.0;
        double u = 1.0 - q;
        return amplitude * u * u * u * u;
    };
    g.grad = [=](const Vec3& x) {
        double q = (x - center).norm2() / (radius * radius);
        if (q >= 1.0) return Vec3{};
        double u = 1.0 - q;
        return (x - center) * (-8.0 * amplitude * u * u * u / (radius * radius));
    };
    return g;
}

PotentialField gauge_shift(const PotentialField& A, const GaugeFunction& g) {
    if (!g.grad) throw ConfigError("gauge function needs an evaluable gradient");
    auto base = A.A;
    auto grad = g.grad;
    PotentialField f;
    f.A = [base, grad](const Vec3& x) { return base(x) + grad(x); };
    f.flux = A.flux; // closed-loop integrals of gradients vanish
    f.range = A.range;
    f.gauge_tag = A.gauge_tag + "+dlambda";
    f.field_model = A.field_model;
    if (g.compact_support) {
        f.lambda_infinity = A.lambda_infinity;
        f.line_integral = A.line_integral; // full-line integral of grad lambda is 0
    } else {
        auto base_inf = A.lambda_infinity;
        auto ginf = g.lambda_inf;
        if (ginf) {
            f.lambda_infinity = [base_inf, ginf](const Vec3& d) {
                return (base_inf ? base_inf(d) : 0.0) + ginf(d);
            };
        } else {
            f.lambda_infinity = A.lambda_infinity;
        }
        f.line_integral = nullptr;
        f.range.short_range = false;
    }
    return f;
}

PotentialField add_integer_flux(const PotentialField& A, const std::vector<int>& n,
                                const ObstacleSet& K) {
    if (n.size() != K.tori.size()) throw ConfigError("integer flux vector size mismatch");
    auto loops = std::make_shared<LoopPotentialSet>(K);
    auto coeff = std::make_shared<std::vector<double>>();
    for (int nj : n) coeff->push_back(2.0 * M_PI * nj);
    auto base = A.A;
    PotentialField f;
    f.A = [base, loops, coeff](const Vec3& x) {
        Vec3 a = base(x);
        for (size_t j = 0; j < loops->size(); ++j)
            if ((*coeff)[j] != 0.0) a += (*loops)[j].eval(x) * (*coeff)[j];
        return a;
    };
    f.flux = A.flux;
    if (f.flux.phi.size() != n.size()) f.flux = FluxAssignment::zeros(n.size());
    for (size_t j = 0; j < n.size(); ++j) f.flux.phi[j] += 2.0 * M_PI * n[j];
    f.range = A.range;
    double r0 = 2.0 * std::max(K.enclosing_radius, 1.0);
    f.range.constant = estimate_decay_constant(f.A, f.range.epsilon, r0);
    f.gauge_tag = A.gauge_tag + "+2pi-n";
    f.lambda_infinity = A.lambda_infinity;
    f.field_model = A.field_model;
    return f;
}

} // namespace abscat
