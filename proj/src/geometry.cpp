#include "abscat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abscat/errors.hpp"

namespace abscat {

void Torus::validate() const {
    if (!(major > 0.0) || !(minor > 0.0) || !(major > minor))
        throw ConfigError("torus requires major > minor > 0");
    if (!is_unit(axis, 1e-12)) throw ConfigError("torus axis must be a unit vector");
    if (!center.finite()) throw ConfigError("torus center not finite");
}

ClosedCurve Torus::core_circle() const {
    return ClosedCurve::circle(center, major, frame_e1(), frame_e2());
}

ClosedCurve Torus::reference_loop() const {
    Vec3 n = normalized(axis);
    Vec3 e1 = frame_e1();
    Vec3 q0 = center + e1 * major;
    // (e1, -axis) orientation gives linking +1 with the counterclockwise core.
    return ClosedCurve::circle(q0, reference_loop_radius(), e1, -n);
}

double Torus::core_distance(const Vec3& p) const {
    Vec3 n = normalized(axis);
    Vec3 q = p - center;
    double h = dot(q, n);
    Vec3 radial = q - n * h;
    double rho = radial.norm();
    double dr = rho - major;
    return std::sqrt(dr * dr + h * h);
}

void Ball::validate() const {
    if (!(radius > 0.0)) throw ConfigError("ball requires radius > 0");
    if (!center.finite()) throw ConfigError("ball center not finite");
}

Ray::Ray(const Vec3& base_, const Vec3& dir_) : base(base_), dir(dir_) {
    if (!is_unit(dir, 1e-12)) throw ConfigError("ray direction must be a unit vector");
}

void ObstacleSet::validate() const {
    for (const auto& t : tori) t.validate();
    for (const auto& b : balls) b.validate();
    if (!(enclosing_radius > 0.0) && !(tori.empty() && balls.empty()))
        throw ConfigError("enclosing radius must be positive");
    for (const auto& t : tori) {
        if (t.center.norm() + t.major + t.minor >= enclosing_radius)
            throw ConfigError("torus not inside the enclosing ball");
    }
    for (const auto& b : balls) {
        if (b.center.norm() + b.radius >= enclosing_radius)
            throw ConfigError("ball not inside the enclosing ball");
    }
    // Pairwise disjointness, conservative bounding-sphere pre-check followed
    // by sampled surface distance for torus pairs.
    auto bounding = [](const Torus& t) { return t.major + t.minor; };
    for (size_t i = 0; i < tori.size(); ++i) {
        for (size_t j = i + 1; j < tori.size(); ++j) {
            double d = (tori[i].center - tori[j].center).norm();
            if (d >= bounding(tori[i]) + bounding(tori[j])) continue;
            double sep = curve_separation(tori[i].core_circle(), tori[j].core_circle());
            if (sep <= tori[i].minor + tori[j].minor)
                throw ConfigError("tori " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        }
        for (size_t j = 0; j < balls.size(); ++j) {
            double d = (tori[i].center - balls[j].center).norm();
            if (d >= bounding(tori[i]) + balls[j].radius) continue;
            if (tori[i].core_distance(balls[j].center) <= tori[i].minor + balls[j].radius)
                throw ConfigError("torus " + std::to_string(i) + " and ball " + std::to_string(j) + " intersect");
        }
    }
    for (size_t i = 0; i < balls.size(); ++i)
        for (size_t j = i + 1; j < balls.size(); ++j)
            if ((balls[i].center - balls[j].center).norm() <= balls[i].radius + balls[j].radius)
                throw ConfigError("balls " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
}

double ObstacleSet::length_scale() const {
    double s = 0.0;
    for (const auto& t : tori) s = std::max(s, t.major);
    for (const auto& b : balls) s = std::max(s, b.radius);
    return s > 0.0 ? s : 1.0;
}

bool operator==(const LineClass& a, const LineClass& b) {
    return a.tag == b.tag && a.hole == b.hole && a.sign == b.sign && a.linking == b.linking;
}

bool point_in_obstacle(const Vec3& p, const ObstacleSet& K) {
    for (const auto& t : K.tori)
        if (t.contains(p)) return true;
    for (const auto& b : K.balls)
        if (b.contains(p)) return true;
    return false;
}

double line_core_distance(const Ray& ray, const Torus& t) {
    Vec3 e1 = t.frame_e1(), e2 = t.frame_e2();
    auto dist = [&](double ang) {
        Vec3 p = t.center + (e1 * std::cos(ang) + e2 * std::sin(ang)) * t.major;
        return cross(p - ray.base, ray.dir).norm();
    };
    // Dense scan, then golden-section refinement around every local minimum
    // candidate. d(ang) is t.major-Lipschitz, so the scan grid certifies the
    // global minimum to within major * pi / N before refinement.
    const int N = 512;
    double best = dist(0.0);
    int best_i = 0;
    std::vector<double> vals(N);
    for (int i = 0; i < N; ++i) {
        vals[i] = dist(2.0 * M_PI * i / N);
        if (vals[i] < best) {
            best = vals[i];
            best_i = i;
        }
    }
    double slack = t.major * M_PI / N;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < N; ++i) {
        if (vals[i] > best + 2.0 * slack) continue;
        double a = 2.0 * M_PI * (i - 1) / N;
        double b = 2.0 * M_PI * (i + 1) / N;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = dist(c), fd = dist(d);
        for (int it = 0; it < 60; ++it) {
            if (fc < fd) {
                b = d; d = c; fd = fc;
                c = b - gr * (b - a);
                fc = dist(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + gr * (b - a);
                fd = dist(d);
            }
        }
        best = std::min(best, std::min(fc, fd));
    }
    (void)best_i;
    return best;
}

bool ray_in_exterior(const Ray& ray, const ObstacleSet& K) {
    for (const auto& b : K.balls) {
        if (cross(b.center - ray.base, ray.dir).norm() <= b.radius) return false;
    }
    for (const auto& t : K.tori) {
        if (line_core_distance(ray, t) <= t.minor) return false;
    }
    return true;
}

ClosedCurve make_c_curve(const Ray& ray, const ObstacleSet& K) {
    return make_c_curve(ray, K.enclosing_radius);
}

ClosedCurve make_c_curve(const Ray& ray, double r) {
    // Solve |base + t dir|^2 = r^2.
    double b = dot(ray.base, ray.dir);
    double c = ray.base.norm2() - r * r;
    double disc = b * b - c;
    if (disc <= 0.0) throw NoIntersection("ray misses the enclosing ball");
    double t0 = -b - std::sqrt(disc);
    double t1 = -b + std::sqrt(disc);
    Vec3 entry = ray.at(t0);
    Vec3 exit = ray.at(t1);

    std::vector<CurvePiece> pieces;
    pieces.push_back(SegmentPiece{entry, exit});

    Vec3 u = normalized(exit);
    Vec3 w = entry / r; // unit; target of the arc
    double cosang = std::clamp(dot(u, w), -1.0, 1.0);
    double ang = std::acos(cosang);
    Vec3 v;
    if (ang > M_PI - 1e-9) {
        // Antipodal endpoints (ray through the center): pick the great
        // circle deterministically; any arc gives the same line class.
        v = any_orthogonal(u);
        ang = M_PI;
    } else if (ang < 1e-12) {
        throw NoIntersection("degenerate chord on the enclosing sphere");
    } else {
        v = normalized(w - u * cosang);
    }
    pieces.push_back(ArcPiece{Vec3{0, 0, 0}, r, u, v, 0.0, ang});
    return ClosedCurve(std::move(pieces));
}

LineClass classify_ray(const Ray& ray, const ObstacleSet& K) {
    K.validate();
    if (!ray_in_exterior(ray, K)) {
        LineClass lc;
        lc.tag = RayClassTag::Blocked;
        return lc;
    }
    LineClass lc;
    lc.linking.assign(K.tori.size(), 0);
    // A line that misses the enclosing ball bounds a chain outside K.
    double impact = cross(ray.base, ray.dir).norm();
    if (impact >= K.enclosing_radius || K.tori.empty()) {
        lc.tag = RayClassTag::Outside;
        return lc;
    }
    ClosedCurve c = make_c_curve(ray, K);
    int nonzero = 0;
    for (size_t j = 0; j < K.tori.size(); ++j) {
        LinkingResult lr = linking_number(c, K.tori[j].core_circle());
        lc.linking[j] = lr.value;
        if (lr.value != 0) ++nonzero;
    }
    if (nonzero == 0) {
        lc.tag = RayClassTag::Outside;
        return lc;
    }
    if (nonzero > 1) throw UnsupportedTopology("ray links more than one torus");
    for (size_t j = 0; j < lc.linking.size(); ++j) {
        if (lc.linking[j] != 0) {
            if (std::abs(lc.linking[j]) != 1)
                throw UnsupportedTopology("linking number exceeds 1 in magnitude");
            lc.tag = RayClassTag::ThroughHole;
            lc.hole = static_cast<int>(j);
            lc.sign = lc.linking[j];
        }
    }
    return lc;
}

bool tube_disjointness(const ObstacleSet& K, const Vec3& v) {
    Vec3 d = normalized(v);
    auto project = [&](const Vec3& p) { return p - d * dot(p, d); };
    struct Shadow {
        Vec3 c;
        double r;
    };
    std::vector<Shadow> torus_shadows, ball_shadows;
    for (const auto& t : K.tori) torus_shadows.push_back({project(t.center), t.major + t.minor});
    for (const auto& b : K.balls) ball_shadows.push_back({project(b.center), b.radius});
    for (size_t i = 0; i < torus_shadows.size(); ++i) {
        for (size_t j = i + 1; j < torus_shadows.size(); ++j) {
            if ((torus_shadows[i].c - torus_shadows[j].c).norm() <=
                torus_shadows[i].r + torus_shadows[j].r)
                return false;
        }
        for (const auto& bs : ball_shadows) {
            if ((torus_shadows[i].c - bs.c).norm() <= torus_shadows[i].r + bs.r) return false;
        }
    }
    return true;
}

} // namespace abscat
