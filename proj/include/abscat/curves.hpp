#pragma once

#include <variant>
#include <vector>

#include "abscat/simd/kernels.hpp"
#include "abscat/vec3.hpp"

namespace abscat {

// Analytic pieces of a closed curve. Each piece maps s in [0,1] to a point;
// derivatives are with respect to s.

struct SegmentPiece {
    Vec3 a, b;
    Vec3 eval(double s) const { return a + (b - a) * s; }
    Vec3 deriv(double) const { return b - a; }
};

// Circular arc: center + radius * (cos(ang) * u + sin(ang) * v),
// ang = ang0 + s * (ang1 - ang0). u, v orthonormal. Full circles use
// ang0 = 0, ang1 = 2*pi.
struct ArcPiece {
    Vec3 center;
    double radius;
    Vec3 u, v;
    double ang0, ang1;
    Vec3 eval(double s) const {
        double a = ang0 + s * (ang1 - ang0);
        return center + (u * std::cos(a) + v * std::sin(a)) * radius;
    }
    Vec3 deriv(double s) const {
        double a = ang0 + s * (ang1 - ang0);
        return (u * -std::sin(a) + v * std::cos(a)) * (radius * (ang1 - ang0));
    }
};

using CurvePiece = std::variant<SegmentPiece, ArcPiece>;

Vec3 piece_eval(const CurvePiece& p, double s);
Vec3 piece_deriv(const CurvePiece& p, double s);
double piece_length(const CurvePiece& p);

// Closed oriented curve made of analytic pieces. The end of the last piece
// must coincide with the start of the first one (checked on construction).
class ClosedCurve {
public:
    static constexpr double kClosureTol = 1e-9;

    explicit ClosedCurve(std::vector<CurvePiece> pieces);

    static ClosedCurve circle(const Vec3& center, double radius, const Vec3& u, const Vec3& v);

    const std::vector<CurvePiece>& pieces() const { return pieces_; }

    // Closed polyline with n samples per piece (first point repeated at the end).
    std::vector<Vec3> sample_points(int per_piece = 64) const;

    // Gauss-Legendre quadrature nodes for line integrals along the curve:
    // positions plus weight-scaled tangents. `level` splits every piece into
    // 2^level panels of `nodes_per_panel` points.
    simd::CurveNodes quadrature_nodes(int level, int nodes_per_panel = 64) const;

    double length() const;
    double diameter() const;
    Vec3 centroid_hint() const { return centroid_; }

private:
    std::vector<CurvePiece> pieces_;
    Vec3 centroid_;
};

struct LinkingResult {
    int value = 0;
    double raw = 0.0;
};

// Gauss linking number of two disjoint closed curves via the double
// line-integral; raw value must land within `integer_tol` of an integer.
LinkingResult linking_number(const ClosedCurve& c1, const ClosedCurve& c2,
                             double integer_tol = 0.01, double refine_tol = 1e-4);

// Minimum distance between the two curves, estimated on dense samples.
double curve_separation(const ClosedCurve& c1, const ClosedCurve& c2);

} // namespace abscat
