#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace abscat {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// det[a b c] = a . (b x c)
inline double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

inline Vec3 normalized(const Vec3& v) {
    double n = v.norm();
    return {v.x / n, v.y / n, v.z / n};
}

inline bool is_unit(const Vec3& v, double tol = 1e-12) {
    return std::abs(v.norm() - 1.0) <= tol;
}

// Deterministic unit vector orthogonal to a given unit vector.
inline Vec3 any_orthogonal(const Vec3& u) {
    double ax = std::abs(u.x), ay = std::abs(u.y), az = std::abs(u.z);
    Vec3 t = (ax <= ay && ax <= az) ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    return normalized(t - u * dot(t, u));
}

inline std::string to_string(const Vec3& v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(%.9g, %.9g, %.9g)", v.x, v.y, v.z);
    return buf;
}

} // namespace abscat
