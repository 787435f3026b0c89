#include "abscat/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "abscat/errors.hpp"
#include "abscat/quadrature.hpp"

namespace abscat {

// ---------------------------------------------------------------------------
// Radon transform and filtered back-projection

SinogramPlane radon_2d(const std::function<double(double, double)>& f, const RadonSpec& spec) {
    if (spec.n_angles < 2 || spec.n_offsets < 2)
        throw ConfigError("sinogram needs at least 2 angles and 2 offsets");
    if (spec.support_radius <= 0.0)
        throw TailBoundUnavailable("radon_2d needs a declared support radius");
    SinogramPlane s;
    s.u_axis = {1, 0, 0};
    s.w_axis = {0, 1, 0};
    s.n_angles = spec.n_angles;
    s.n_offsets = spec.n_offsets;
    s.offset_max = spec.offset_max;
    s.data.assign(size_t(spec.n_angles) * spec.n_offsets, 0.0);
    double L = spec.support_radius;
    for (int m = 0; m < spec.n_angles; ++m) {
        double th = s.angle(m);
        double cu = std::cos(th), su = std::sin(th);
        for (int p = 0; p < spec.n_offsets; ++p) {
            double off = s.offset(p);
            if (std::abs(off) >= L) continue;
            double half = std::sqrt(L * L - off * off);
            auto g = [&](double t) { return f(off * cu - t * su, off * su + t * cu); };
            s.at(m, p) = quad::adaptive_simpson(g, -half, half, spec.tol).value;
        }
    }
    return s;
}

namespace {

// Band-limited ramp filter kernel (cutoff at the offset Nyquist frequency).
inline double ramp_kernel(double t, double d) {
    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x); };
    double a = sinc(t / d);
    double b = sinc(t / (2.0 * d));
    return (0.5 * a - 0.25 * b * b) / (d * d);
}

struct FilteredProjections {
    int refine = 4;
    double s_min = 0.0, ds = 0.0;
    int n = 0;
    std::vector<double> q; // [angle * n + k]

    double eval(int m, double sq) const {
        double x = (sq - s_min) / ds;
        if (x <= 0.0 || x >= n - 1) return 0.0;
        int k = static_cast<int>(x);
        double w = x - k;
        const double* row = q.data() + size_t(m) * n;
        return row[k] * (1.0 - w) + row[k + 1] * w;
    }
};

FilteredProjections filter_sinogram(const SinogramPlane& s) {
    FilteredProjections fp;
    double d = s.offset_spacing();
    fp.ds = d / fp.refine;
    double margin = 0.25 * s.offset_max + 2.0 * d;
    fp.s_min = -s.offset_max - margin;
    fp.n = static_cast<int>(std::ceil(2.0 * (s.offset_max + margin) / fp.ds)) + 1;
    fp.q.assign(size_t(s.n_angles) * fp.n, 0.0);
    for (int m = 0; m < s.n_angles; ++m) {
        for (int k = 0; k < fp.n; ++k) {
            double sq = fp.s_min + k * fp.ds;
            double acc = 0.0;
            for (int p = 0; p < s.n_offsets; ++p) {
                double v = s.at(m, p);
                if (v != 0.0) acc += v * ramp_kernel(sq - s.offset(p), d);
            }
            fp.q[size_t(m) * fp.n + k] = acc * d;
        }
    }
    return fp;
}

} // namespace

std::vector<double> fbp_values_at(const SinogramPlane& s,
                                  const std::vector<std::array<double, 2>>& uv) {
    FilteredProjections fp = filter_sinogram(s);
    std::vector<double> out(uv.size(), 0.0);
    double wsum = M_PI / s.n_angles;
    for (int m = 0; m < s.n_angles; ++m) {
        double th = s.angle(m);
        double cu = std::cos(th), su = std::sin(th);
        for (size_t i = 0; i < uv.size(); ++i) {
            double sq = uv[i][0] * cu + uv[i][1] * su;
            out[i] += fp.eval(m, sq) * wsum;
        }
    }
    return out;
}

ReconstructionGrid fbp_invert(const SinogramPlane& s, const PlaneGridSpec& grid) {
    ReconstructionGrid out;
    out.grid = grid;
    std::vector<std::array<double, 2>> uv;
    uv.reserve(size_t(grid.n) * grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            uv.push_back({(i - 0.5 * (grid.n - 1)) * grid.spacing,
                          (j - 0.5 * (grid.n - 1)) * grid.spacing});
    out.scalar = fbp_values_at(s, uv);
    out.mask.assign(out.scalar.size(), 1);
    // Heuristic sampling adequacy: angles should resolve the grid bandwidth.
    if (s.n_angles < grid.n / 2) {
        // flagged, not fatal: callers see the mask but values remain
        for (auto& m : out.mask) m = 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase acquirers

PhaseAcquirer make_potential_phase_acquirer(const PotentialField& A, const ObstacleSet& K,
                                            double tol) {
    PotentialField copy = A;
    ObstacleSet obs = K;
    return [copy, obs, tol](const Vec3& origin, const Vec3& omega, const Vec3& dir,
                            const std::vector<double>& xi) {
        XrayOptions opt;
        opt.tol = tol;
        std::vector<std::complex<double>> out;
        out.reserve(xi.size());
        for (double t : xi) out.push_back(phase_factor(copy, Ray(origin + omega * t, dir), obs, opt));
        return out;
    };
}

PhaseAcquirer make_bump_phase_acquirer(const BumpSpec& bump) {
    return [bump](const Vec3& origin, const Vec3& omega, const Vec3& dir,
                  const std::vector<double>& xi) {
        // a(xi) = -int_xi^{inf} omega . w(origin + t omega) dt with
        // w(y) = int (dir x B)(y + tau dir) dtau. Support along xi is the
        // shadow of the bump ball on the (omega, dir) plane through origin.
        std::vector<std::complex<double>> out(xi.size(), {1.0, 0.0});
        Vec3 rel = bump.center - origin;
        Vec3 h = rel - omega * dot(rel, omega) - dir * dot(rel, dir);
        double r2 = bump.radius * bump.radius - h.norm2();
        if (r2 <= 0.0) return out; // a vanishes on this whole line family
        double xc = dot(rel, omega);
        double rxi = std::sqrt(r2);

        auto w_omega = [&](double t) {
            Vec3 base = origin + omega * t;
            double b = dot(base - bump.center, dir);
            double c2 = (base - bump.center).norm2() - bump.radius * bump.radius;
            double disc = b * b - c2;
            if (disc <= 0.0) return 0.0;
            double s0 = -b - std::sqrt(disc), s1 = -b + std::sqrt(disc);
            const auto& rule = quad::gauss_legendre(6);
            double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
            double acc = 0.0;
            for (int i = 0; i < 6; ++i) {
                Vec3 y = base + dir * (mid + half * rule.nodes[i]);
                acc += rule.weights[i] * dot(omega, cross(dir, bump.field(y)));
            }
            return acc * half;
        };

        // Breakpoints: sorted query xis clipped to the shadow, refined so no
        // segment is wider than the shadow over 64.
        std::vector<double> brk;
        double lo = xc - rxi, hi = xc + rxi;
        for (double t : xi)
            if (t > lo && t < hi) brk.push_back(t);
        double max_seg = 2.0 * rxi / 64.0;
        int nreg = static_cast<int>(std::ceil(2.0 * rxi / max_seg));
        for (int k = 0; k <= nreg; ++k) brk.push_back(lo + 2.0 * rxi * k / nreg);
        std::sort(brk.begin(), brk.end());
        brk.erase(std::unique(brk.begin(), brk.end(),
                              [&](double a, double b) { return std::abs(a - b) < 1e-14 * rxi; }),
                  brk.end());

        // Cumulative integral from the right end (a = 0 beyond hi).
        const auto& rule = quad::gauss_legendre(8);
        std::vector<double> aval(brk.size(), 0.0);
        for (int k = static_cast<int>(brk.size()) - 2; k >= 0; --k) {
            double a0 = brk[k], a1 = brk[k + 1];
            double mid = 0.5 * (a0 + a1), half = 0.5 * (a1 - a0);
            double seg = 0.0;
            for (int q = 0; q < 8; ++q) seg += rule.weights[q] * w_omega(mid + half * rule.nodes[q]);
            seg *= half;
            aval[k] = aval[k + 1] + seg; // a(a0) = a(a1) + int_{a0}^{a1} w
        }
        // a(t) = -int_t^inf w: with the sign above aval[k] = int_{brk[k]}^{hi} w,
        // so a = -aval.
        for (size_t i = 0; i < xi.size(); ++i) {
            double t = xi[i];
            if (t >= hi) continue; // a = 0
            double a;
            if (t <= lo) {
                a = -aval.front();
            } else {
                auto it = std::lower_bound(brk.begin(), brk.end(), t - 1e-13 * rxi);
                a = -aval[size_t(it - brk.begin())];
            }
            out[i] = std::polar(1.0, a);
        }
        return out;
    };
}

// ---------------------------------------------------------------------------
// Field reconstruction

namespace {

bool plane_avoids_obstacles(const Vec3& origin, const Vec3& normal, const ObstacleSet& K) {
    for (const auto& t : K.tori)
        if (std::abs(dot(t.center - origin, normal)) <= t.major + t.minor) return false;
    for (const auto& b : K.balls)
        if (std::abs(dot(b.center - origin, normal)) <= b.radius) return false;
    return true;
}

void check_frame(const PlaneFrame& f) {
    if (std::abs(f.u.norm() - 1.0) > 1e-9 || std::abs(f.v.norm() - 1.0) > 1e-9 ||
        std::abs(dot(f.u, f.v)) > 1e-9)
        throw ConfigError("plane frame must be orthonormal");
}

} // namespace

ReconstructionGrid reconstruct_B(const PhaseAcquirer& phases,
                                 const std::array<PlaneFrame, 3>& frames,
                                 const PlaneGridSpec& region, const ObstacleSet& K,
                                 const ReconstructBParams& params) {
    for (const auto& f : frames) check_frame(f);
    Vec3 n0 = frames[0].normal(), n1 = frames[1].normal(), n2 = frames[2].normal();
    double det = triple(n0, n1, n2);
    if (std::abs(det) < 1e-6) throw DegenerateFrame("plane normals nearly coplanar");

    const int nn = region.n;
    ReconstructionGrid out;
    out.grid = region;
    out.vector.assign(size_t(nn) * nn, Vec3{});
    out.mask.assign(size_t(nn) * nn, 1);

    // Per frame: the scalar field n_j . B sampled at every region node.
    std::vector<std::vector<double>> comps(3, std::vector<double>(size_t(nn) * nn, 0.0));

    for (int jf = 0; jf < 3; ++jf) {
        const PlaneFrame& fr = frames[jf];
        Vec3 nrm = fr.normal();
        // Group nodes by their plane offset along the frame normal.
        std::map<long long, std::vector<int>> groups;
        double qtol = params.plane_group_tol * std::max(1.0, region.spacing * nn);
        for (int i = 0; i < nn; ++i)
            for (int j = 0; j < nn; ++j) {
                double c = dot(region.node(i, j), nrm);
                groups[llround(c / qtol)].push_back(i * nn + j);
            }

        const double h = params.fd_step;
        for (auto& [qc, nodes] : groups) {
            double c = qc * qtol;
            Vec3 plane_origin = nrm * c;
            if (!plane_avoids_obstacles(plane_origin, nrm, K)) {
                for (int k : nodes) out.mask[k] = 0;
                continue;
            }
            SinogramPlane sino;
            sino.origin = plane_origin;
            sino.u_axis = fr.u;
            sino.w_axis = fr.v;
            sino.n_angles = params.n_angles;
            sino.n_offsets = params.n_offsets;
            sino.offset_max = params.offset_max;
            sino.data.assign(size_t(params.n_angles) * params.n_offsets, 0.0);

            std::vector<double> xi(2 * params.n_offsets);
            for (int m = 0; m < params.n_angles; ++m) {
                double th = sino.angle(m);
                Vec3 omega = fr.u * std::cos(th) + fr.v * std::sin(th);
                Vec3 raydir = fr.u * -std::sin(th) + fr.v * std::cos(th);
                for (int p = 0; p < params.n_offsets; ++p) {
                    xi[2 * p] = sino.offset(p) - h;
                    xi[2 * p + 1] = sino.offset(p) + h;
                }
                auto ph = phases(plane_origin, omega, raydir, xi);
                for (int p = 0; p < params.n_offsets; ++p) {
                    // directional derivative of a along omega from the phase
                    // ratio; equals the Radon sample of n . B on this plane
                    sino.at(m, p) = std::arg(ph[2 * p + 1] * std::conj(ph[2 * p])) / (2.0 * h);
                }
            }

            std::vector<std::array<double, 2>> uv;
            uv.reserve(nodes.size());
            for (int k : nodes) {
                Vec3 q = region.node(k / nn, k % nn) - plane_origin;
                uv.push_back({dot(q, fr.u), dot(q, fr.v)});
            }
            std::vector<double> vals = fbp_values_at(sino, uv);
            for (size_t t = 0; t < nodes.size(); ++t) comps[jf][nodes[t]] = vals[t];
        }
    }

    // Solve [n0; n1; n2] B = comps at every node (rows are the normals).
    double m[3][3] = {{n0.x, n0.y, n0.z}, {n1.x, n1.y, n1.z}, {n2.x, n2.y, n2.z}};
    double inv[3][3];
    {
        double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
        double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
        double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
        double d = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
        inv[0][0] = c00 / d;
        inv[1][0] = c01 / d;
        inv[2][0] = c02 / d;
        inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
        inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
        inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
        inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
        inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
        inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
    }
    for (size_t k = 0; k < out.vector.size(); ++k) {
        double g0 = comps[0][k], g1 = comps[1][k], g2 = comps[2][k];
        out.vector[k] = {inv[0][0] * g0 + inv[0][1] * g1 + inv[0][2] * g2,
                         inv[1][0] * g0 + inv[1][1] * g1 + inv[1][2] * g2,
                         inv[2][0] * g0 + inv[2][1] * g1 + inv[2][2] * g2};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Electric potential reconstruction

VSampler make_xray_v_sampler(const ScalarPotentialModel& V, const ObstacleSet& K, double tol) {
    ScalarPotentialModel copy = V;
    ObstacleSet obs = K;
    return [copy, obs, tol](const Vec3& base, const Vec3& dir) {
        XrayOptions opt;
        opt.tol = tol;
        return xray_V(copy, Ray(base, dir), obs, opt);
    };
}

VSampler make_matrix_element_v_sampler(const PotentialField& A, const ScalarPotentialModel& V,
                                       const ObstacleSet& K, int probe_n, double probe_spacing,
                                       double probe_sigma) {
    PotentialField pa = A;
    ScalarPotentialModel pv = V;
    ObstacleSet obs = K;
    return [pa, pv, obs, probe_n, probe_spacing, probe_sigma](const Vec3& base, const Vec3& dir) {
        WavePacket probe = gaussian_packet(dir, base, probe_n, probe_spacing, probe_sigma, 0.5);
        NextOrderConfig cfg;
        cfg.tol = 1e-9;
        NextOrderResult r =
            next_order_matrix_element(pa, pv, MagneticFieldModel::zero(), obs, probe, probe, cfg);
        // Leading-order datum for the same probe divides out the phase.
        ScatteredPacket s = apply_S_leading(pa, obs, probe, XrayOptions{1e-9, true});
        Complex z = inner_product(s, probe);
        Complex val = r.total / (Complex{0.0, -1.0} * z);
        return val.real();
    };
}

ReconstructionGrid reconstruct_V(const VSampler& samples, const PlaneFrame& frame,
                                 const PlaneGridSpec& region, const ObstacleSet& K,
                                 const ReconstructBParams& params) {
    check_frame(frame);
    Vec3 nrm = frame.normal();
    const int nn = region.n;
    ReconstructionGrid out;
    out.grid = region;
    out.scalar.assign(size_t(nn) * nn, 0.0);
    out.mask.assign(size_t(nn) * nn, 1);

    std::map<long long, std::vector<int>> groups;
    double qtol = params.plane_group_tol * std::max(1.0, region.spacing * nn);
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j)
            groups[llround(dot(region.node(i, j), nrm) / qtol)].push_back(i * nn + j);

    for (auto& [qc, nodes] : groups) {
        double c = qc * qtol;
        Vec3 plane_origin = nrm * c;
        if (!plane_avoids_obstacles(plane_origin, nrm, K)) {
            for (int k : nodes) out.mask[k] = 0;
            continue;
        }
        SinogramPlane sino;
        sino.origin = plane_origin;
        sino.u_axis = frame.u;
        sino.w_axis = frame.v;
        sino.n_angles = params.n_angles;
        sino.n_offsets = params.n_offsets;
        sino.offset_max = params.offset_max;
        sino.data.assign(size_t(params.n_angles) * params.n_offsets, 0.0);
        for (int m = 0; m < params.n_angles; ++m) {
            double th = sino.angle(m);
            Vec3 omega = frame.u * std::cos(th) + frame.v * std::sin(th);
            Vec3 raydir = frame.u * -std::sin(th) + frame.v * std::cos(th);
            for (int p = 0; p < params.n_offsets; ++p)
                sino.at(m, p) = samples(plane_origin + omega * sino.offset(p), raydir);
        }
        std::vector<std::array<double, 2>> uv;
        uv.reserve(nodes.size());
        for (int k : nodes) {
            Vec3 q = region.node(k / nn, k % nn) - plane_origin;
            uv.push_back({dot(q, frame.u), dot(q, frame.v)});
        }
        std::vector<double> vals = fbp_values_at(sino, uv);
        for (size_t t = 0; t < nodes.size(); ++t) out.scalar[nodes[t]] = vals[t];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Packet partition and flux recovery

HolePartition partition_packet(const WavePacket& phi, const ObstacleSet& K) {
    HolePartition part;
    part.label.assign(size_t(phi.n) * phi.n, -2);
    WavePacket zero = phi;
    for (auto& a : zero.amp) a = 0.0;
    part.out_part = zero;

    std::map<int, WavePacket> holes;
    for (int i = 0; i < phi.n; ++i) {
        for (int j = 0; j < phi.n; ++j) {
            size_t k = size_t(i) * phi.n + j;
            if (std::abs(phi.at(i, j)) <= 1e-12) continue;
            Ray ray(phi.node_pos(i, j), phi.dir);
            LineClass lc = classify_ray(ray, K);
            if (lc.tag == RayClassTag::Blocked)
                throw SupportTouchesObstacle("node (" + std::to_string(i) + "," +
                                             std::to_string(j) + ")");
            if (lc.tag == RayClassTag::Outside) {
                part.label[k] = -2;
                part.out_part.amp[k] = phi.amp[k];
            } else {
                part.label[k] = lc.hole;
                auto it = holes.find(lc.hole);
                if (it == holes.end()) it = holes.emplace(lc.hole, zero).first;
                it->second.amp[k] = phi.amp[k];
            }
        }
    }
    for (auto& [h, packet] : holes) {
        part.holes.push_back(h);
        part.hole_parts.push_back(std::move(packet));
    }
    return part;
}

FluxRecovery recover_fluxes(const ScatteredPacket& s_out, const WavePacket& phi,
                            const HolePartition& partition) {
    s_out.packet.check_grid_compatible(phi);
    double out_mass = partition.out_part.mass();
    if (out_mass <= 1e-6) throw EmptyPart("outside part");
    FluxRecovery rec;
    Complex zout = inner_product(s_out.packet, partition.out_part);
    rec.lambda_inf_phase = std::arg(zout / out_mass);
    for (size_t t = 0; t < partition.holes.size(); ++t) {
        double m = partition.hole_parts[t].mass();
        if (m <= 1e-6) throw EmptyPart("hole part " + std::to_string(partition.holes[t]));
        Complex zh = inner_product(s_out.packet, partition.hole_parts[t]);
        rec.flux.push_back(wrap_angle(std::arg(zh / m) - rec.lambda_inf_phase));
    }
    return rec;
}

double closed_loop_flux(const Vec3& x, const Vec3& y, const Vec3& v, const Vec3& w,
                        const PotentialField& A, const ObstacleSet& K, const XrayOptions& opt) {
    Vec3 vv = normalized(v), ww = normalized(w);
    if (dot(vv, ww) < 0.0) throw ConfigError("closed loop requires v . w >= 0");
    double ax = xray_a(A, Ray(x, vv), K, opt);
    double ay = xray_a(A, Ray(y, ww), K, opt);
    return wrap_angle(ax - ay);
}

} // namespace abscat
