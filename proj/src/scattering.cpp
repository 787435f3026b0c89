#include "abscat/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "abscat/errors.hpp"
#include "abscat/quadrature.hpp"

namespace abscat {

double WavePacket::mass() const {
    std::vector<double> terms(amp.size());
    for (size_t k = 0; k < amp.size(); ++k) terms[k] = std::norm(amp[k]);
    return quad::pairwise_sum(terms) * spacing * spacing;
}

void WavePacket::check_grid_compatible(const WavePacket& other) const {
    if (n != other.n || std::abs(spacing - other.spacing) > 1e-12 ||
        (dir - other.dir).norm() > 1e-12 || (center - other.center).norm() > 1e-12 ||
        (e1 - other.e1).norm() > 1e-12 || (e2 - other.e2).norm() > 1e-12)
        throw GridMismatch("wave packets live on different grids");
}

WavePacket gaussian_packet(const Vec3& dir, const Vec3& center, int n, double spacing,
                           double sigma_perp, double sigma_par, double c1, double c2) {
    if (n < 4) throw ConfigError("packet grid too small");
    WavePacket p;
    p.dir = normalized(dir);
    p.center = center;
    p.e1 = any_orthogonal(p.dir);
    p.e2 = cross(p.dir, p.e1);
    p.spacing = spacing;
    p.n = n;
    p.sigma_par = sigma_par;
    p.amp.assign(size_t(n) * n, Complex{});
    for (int i = 0; i < n; ++i) {
        double u = p.offset(i) - c1;
        for (int j = 0; j < n; ++j) {
            double w = p.offset(j) - c2;
            p.at(i, j) = std::exp(-(u * u + w * w) / (4.0 * sigma_perp * sigma_perp));
        }
    }
    double m = p.mass();
    if (!(m > 0.0)) throw ConfigError("packet has no mass on the grid");
    double s = 1.0 / std::sqrt(m);
    for (auto& a : p.amp) a *= s;
    return p;
}

ScatteredPacket apply_S_leading(const PotentialField& A, const ObstacleSet& K,
                                const WavePacket& phi, const XrayOptions& opt) {
    ScatteredPacket out{phi, A.gauge_tag};
    std::string offenders;
    int bad = 0;
    for (int i = 0; i < phi.n; ++i) {
        for (int j = 0; j < phi.n; ++j) {
            if (std::abs(phi.at(i, j)) <= 1e-12) {
                out.packet.at(i, j) = phi.at(i, j);
                continue;
            }
            Ray ray(phi.node_pos(i, j), phi.dir);
            if (!ray_in_exterior(ray, K)) {
                if (++bad <= 8)
                    offenders += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
                continue;
            }
            double a = xray_a(A, ray, K, opt);
            out.packet.at(i, j) = phi.at(i, j) * std::polar(1.0, a);
        }
    }
    if (bad > 0)
        throw SupportTouchesObstacle(std::to_string(bad) + " node rays:" + offenders);
    return out;
}

Complex inner_product(const WavePacket& phi, const WavePacket& psi) {
    phi.check_grid_compatible(psi);
    std::vector<double> re(phi.amp.size()), im(phi.amp.size());
    for (size_t k = 0; k < phi.amp.size(); ++k) {
        Complex t = phi.amp[k] * std::conj(psi.amp[k]);
        re[k] = t.real();
        im[k] = t.imag();
    }
    double d2 = phi.spacing * phi.spacing;
    return {quad::pairwise_sum(re) * d2, quad::pairwise_sum(im) * d2};
}

Complex inner_product(const ScatteredPacket& phi, const WavePacket& psi) {
    return inner_product(phi.packet, psi);
}

// ---------------------------------------------------------------------------
// Next-to-leading order

namespace {

struct NodeField {
    double f1 = 0.0, f2 = 0.0; // components along e1, e2
    double q = 0.0;            // integral of |eta|^2
};

// transverse grid derivative, 4th order central with zero padding
void transverse_derivative(const std::vector<Complex>& v, int n, double h, int axis,
                           std::vector<Complex>& out, bool second_order) {
    out.assign(v.size(), Complex{});
    auto get = [&](int i, int j) -> Complex {
        if (i < 0 || j < 0 || i >= n || j >= n) return {};
        return v[size_t(i) * n + j];
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Complex d;
            if (second_order) {
                d = (axis == 0 ? get(i + 1, j) - get(i - 1, j) : get(i, j + 1) - get(i, j - 1)) /
                    (2.0 * h);
            } else {
                Complex p2 = axis == 0 ? get(i + 2, j) : get(i, j + 2);
                Complex p1 = axis == 0 ? get(i + 1, j) : get(i, j + 1);
                Complex m1 = axis == 0 ? get(i - 1, j) : get(i, j - 1);
                Complex m2 = axis == 0 ? get(i - 2, j) : get(i, j - 2);
                d = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
            }
            out[size_t(i) * n + j] = d;
        }
    }
}

} // namespace

NextOrderResult next_order_matrix_element(const PotentialField& A, const ScalarPotentialModel& V,
                                          const MagneticFieldModel& B, const ObstacleSet& K,
                                          const WavePacket& phi, const WavePacket& psi,
                                          const NextOrderConfig& cfg) {
    phi.check_grid_compatible(psi);
    if (std::abs(phi.sigma_par - psi.sigma_par) > 1e-12)
        throw GridMismatch("packets must share the longitudinal profile");
    const int n = phi.n;
    const double d2 = phi.spacing * phi.spacing;
    const Vec3 vdir = phi.dir;

    // Active nodes: wherever either packet (or a stencil neighbor) carries
    // amplitude.
    std::vector<uint8_t> active(size_t(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(phi.at(i, j)) > 1e-13 || std::abs(psi.at(i, j)) > 1e-13) {
                for (int di = -2; di <= 2; ++di)
                    for (int dj = -2; dj <= 2; ++dj) {
                        int ii = i + di, jj = j + dj;
                        if (ii >= 0 && jj >= 0 && ii < n && jj < n) active[size_t(ii) * n + jj] = 1;
                    }
            }

    XrayOptions xopt;
    xopt.tol = cfg.tol;

    std::vector<Complex> phase(size_t(n) * n, Complex{1.0, 0.0});
    std::vector<double> iv(size_t(n) * n, 0.0);
    const bool haveB = B.tag != FieldTag::ZeroExterior;
    std::vector<NodeField> Fm(size_t(n) * n), Fp(size_t(n) * n);

    const auto& urule = quad::gauss_legendre(cfg.longitudinal_nodes);
    const auto& srule = quad::gauss_legendre(8);
    const auto& orule = quad::gauss_legendre(12);
    const double sp = phi.sigma_par;

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            size_t k = size_t(i) * n + j;
            if (!active[k]) continue;
            Vec3 node = phi.node_pos(i, j);
            Ray ray(node, vdir);
            if (!ray_in_exterior(ray, K)) throw SupportTouchesObstacle("next-order node ray");
            phase[k] = std::polar(1.0, xray_a(A, ray, K, xopt));
            iv[k] = xray_V(V, ray, K, xopt);
            if (!haveB || !B.bump) continue;

            const BumpSpec& bump = *B.bump;
            double b = dot(node - bump.center, vdir);
            double c2 = (node - bump.center).norm2() - bump.radius * bump.radius;
            double disc = b * b - c2;
            if (disc <= 0.0) continue;
            double s0 = -b - std::sqrt(disc), s1 = -b + std::sqrt(disc);
            auto W = [&](double s) { return cross(vdir, bump.field(ray.at(s))); };
            auto Wint = [&](double lo, double hi, auto&& weight) {
                Vec3 acc{};
                if (hi <= lo) return acc;
                double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                for (int q = 0; q < 8; ++q) {
                    double s = mid + half * srule.nodes[q];
                    acc += W(s) * (srule.weights[q] * weight(s));
                }
                return acc * half;
            };
            auto Cfun = [&](double s) { // cumulative of W from s0
                if (s <= s0) return Vec3{};
                return Wint(s0, std::min(s, s1), [](double) { return 1.0; });
            };
            Vec3 M0 = Cfun(s1);

            double U = std::max(6.0 * sp, std::max(std::abs(s0), std::abs(s1)) + sp);
            NodeField fm, fp;
            for (int q = 0; q < cfg.longitudinal_nodes; ++q) {
                double u = U * urule.nodes[q];
                double gw = U * urule.weights[q] * std::exp(-u * u / (sp * sp)) /
                            (std::sqrt(M_PI) * sp);
                // first moments of W about u
                Vec3 F2 = Wint(s0, std::min(u, s1), [&](double s) { return s - u; });
                Vec3 F3 = Wint(std::max(u, s0), s1, [&](double s) { return s - u; });
                // quadratic terms
                double q2 = 0.0, q3 = 0.0;
                {
                    double hi = std::min(u, s1);
                    if (hi > s0) {
                        double mid = 0.5 * (s0 + hi), half = 0.5 * (hi - s0);
                        for (int t = 0; t < 12; ++t) {
                            double s = mid + half * orule.nodes[t];
                            q2 += orule.weights[t] * Cfun(s).norm2();
                        }
                        q2 *= half;
                    }
                    if (u > s1) q2 += M0.norm2() * (u - s1);
                }
                {
                    double lo = std::max(u, s0);
                    if (s1 > lo) {
                        double mid = 0.5 * (lo + s1), half = 0.5 * (s1 - lo);
                        for (int t = 0; t < 12; ++t) {
                            double s = mid + half * orule.nodes[t];
                            q3 += orule.weights[t] * (M0 - Cfun(s)).norm2();
                        }
                        q3 *= half;
                    }
                    if (u < s0) q3 += M0.norm2() * (s0 - u);
                }
                fm.f1 += gw * dot(F2, phi.e1);
                fm.f2 += gw * dot(F2, phi.e2);
                fm.q += gw * q2;
                fp.f1 += gw * dot(F3, phi.e1);
                fp.f2 += gw * dot(F3, phi.e2);
                fp.q += gw * q3;
            }
            Fm[k] = fm;
            Fp[k] = fp;
        }
    }

    NextOrderResult res;
    const Complex mi{0.0, -1.0}; // -i
    const double inv2m = 1.0 / (2.0 * cfg.mass);

    // electric term: -i e^{ia} (int V) phi, paired with psi
    {
        std::vector<double> re(size_t(n) * n, 0.0), im(re.size());
        for (size_t k = 0; k < re.size(); ++k) {
            Complex t = mi * phase[k] * iv[k] * phi.amp[k] * std::conj(psi.amp[k]) * d2;
            re[k] = t.real();
            im[k] = t.imag();
        }
        res.v_term = {quad::pairwise_sum(re), quad::pairwise_sum(im)};
    }

    if (haveB) {
        auto xi_term = [&](const std::vector<NodeField>& F, const std::vector<Complex>& target,
                           bool phase_outside, bool second_order, Complex* quad_out) {
            // operator (1/2m)[ i div F + 2 i F.grad + Q ] applied to target
            std::vector<Complex> d1, d2c;
            transverse_derivative(target, n, phi.spacing, 0, d1, second_order);
            transverse_derivative(target, n, phi.spacing, 1, d2c, second_order);
            std::vector<Complex> f1(size_t(n) * n), f2(size_t(n) * n);
            for (size_t k = 0; k < f1.size(); ++k) {
                f1[k] = F[k].f1;
                f2[k] = F[k].f2;
            }
            std::vector<Complex> df1, df2;
            transverse_derivative(f1, n, phi.spacing, 0, df1, second_order);
            transverse_derivative(f2, n, phi.spacing, 1, df2, second_order);
            std::vector<double> re(size_t(n) * n), im(re.size()), req(re.size()), imq(re.size());
            for (size_t k = 0; k < re.size(); ++k) {
                Complex divF = df1[k] + df2[k];
                Complex lin = inv2m * (Complex{0, 1} * divF * target[k] +
                                       Complex{0, 2} * (F[k].f1 * d1[k] + F[k].f2 * d2c[k]));
                Complex qd = inv2m * F[k].q * target[k];
                Complex outer = phase_outside ? phase[k] : Complex{1.0, 0.0};
                Complex tl = mi * outer * lin * std::conj(psi.amp[k]) * d2;
                Complex tq = mi * outer * qd * std::conj(psi.amp[k]) * d2;
                re[k] = tl.real();
                im[k] = tl.imag();
                req[k] = tq.real();
                imq[k] = tq.imag();
            }
            if (quad_out) *quad_out = {quad::pairwise_sum(req), quad::pairwise_sum(imq)};
            return Complex{quad::pairwise_sum(re), quad::pairwise_sum(im)};
        };

        // tau < 0: operator acts on phi, phase multiplies afterwards
        std::vector<Complex> phi_nodes = phi.amp;
        res.xi_minus_linear = xi_term(Fm, phi_nodes, true, false, &res.xi_minus_quadratic);
        // tau > 0: operator acts on e^{ia} phi
        std::vector<Complex> rho(phi.amp.size());
        for (size_t k = 0; k < rho.size(); ++k) rho[k] = phase[k] * phi.amp[k];
        res.xi_plus_linear = xi_term(Fp, rho, false, false, &res.xi_plus_quadratic);

        Complex lin4 = res.xi_minus_linear + res.xi_plus_linear;
        Complex lin2 = xi_term(Fm, phi_nodes, true, true, nullptr) +
                       xi_term(Fp, rho, false, true, nullptr);
        double mag = std::abs(lin4);
        if (mag > 1e-12 && std::abs(lin4 - lin2) > cfg.fd_check_fraction * mag)
            throw GridTooCoarse("finite-difference momentum terms disagree between orders");
    }

    res.total = res.v_term + res.xi_minus_linear + res.xi_minus_quadratic + res.xi_plus_linear +
                res.xi_plus_quadratic;
    return res;
}

} // namespace abscat
