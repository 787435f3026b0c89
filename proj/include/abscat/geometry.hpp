#pragma once

#include <optional>
#include <vector>

#include "abscat/curves.hpp"
#include "abscat/vec3.hpp"

namespace abscat {

// Solid torus: tube of radius `minor` around the circle of radius `major`
// centered at `center` in the plane orthogonal to `axis`.
struct Torus {
    Vec3 center;
    double major = 0.0;
    double minor = 0.0;
    Vec3 axis{0, 0, 1};

    void validate() const;

    // Orthonormal frame (e1, e2, axis); e1 x e2 = axis.
    Vec3 frame_e1() const { return any_orthogonal(normalized(axis)); }
    Vec3 frame_e2() const { return cross(normalized(axis), frame_e1()); }

    // Core circle, oriented counterclockwise around the axis.
    ClosedCurve core_circle() const;

    // Meridian reference loop in the exterior, oriented so that it links the
    // core circle with sign +1 (Ampere normalization).
    ClosedCurve reference_loop() const;
    double reference_loop_radius() const { return minor + 0.25 * (major - minor); }

    // Distance from a point to the core circle; the solid torus is the set
    // where this is <= minor.
    double core_distance(const Vec3& p) const;

    bool contains(const Vec3& p) const { return core_distance(p) <= minor; }
};

struct Ball {
    Vec3 center;
    double radius = 0.0;

    void validate() const;
    bool contains(const Vec3& p) const { return (p - center).norm() <= radius; }
};

struct Ray {
    Vec3 base;
    Vec3 dir; // unit

    Ray() = default;
    Ray(const Vec3& base_, const Vec3& dir_);
    Vec3 at(double t) const { return base + dir * t; }
};

struct ObstacleSet {
    std::vector<Torus> tori;
    std::vector<Ball> balls;
    double enclosing_radius = 0.0;

    void validate() const;
    double length_scale() const;
};

enum class RayClassTag { Outside, ThroughHole, Blocked };

struct LineClass {
    RayClassTag tag = RayClassTag::Outside;
    int hole = -1; // torus index when tag == ThroughHole
    int sign = 0;  // +-1 when tag == ThroughHole
    std::vector<int> linking; // one entry per torus (empty when Blocked)
};

bool operator==(const LineClass& a, const LineClass& b);

// Membership in the closed solid K.
bool point_in_obstacle(const Vec3& p, const ObstacleSet& K);

// True iff the full line base + R*dir avoids every component of K.
bool ray_in_exterior(const Ray& ray, const ObstacleSet& K);

// Minimum distance from the line to the core circle of a torus; certified by
// dense sampling plus local refinement (the distance function is
// major-Lipschitz in the circle parameter).
double line_core_distance(const Ray& ray, const Torus& t);

// Chord of the enclosing ball along the ray, closed by the shorter
// great-circle arc on the ball boundary from the exit back to the entry
// point. Throws NoIntersection if the ray misses the open ball.
ClosedCurve make_c_curve(const Ray& ray, const ObstacleSet& K);
ClosedCurve make_c_curve(const Ray& ray, double enclosing_radius);

LineClass classify_ray(const Ray& ray, const ObstacleSet& K);

// Conservative projected-disc test for the beam-shadow disjointness of the
// obstacle components in direction v: torus shadows are bounded by discs of
// radius major+minor, ball shadows by their radius.
bool tube_disjointness(const ObstacleSet& K, const Vec3& v);

} // namespace abscat
