#include "abscat/curves.hpp"

#include <algorithm>
#include <cmath>

#include "abscat/errors.hpp"
#include "abscat/quadrature.hpp"

namespace abscat {

Vec3 piece_eval(const CurvePiece& p, double s) {
    return std::visit([s](const auto& q) { return q.eval(s); }, p);
}

Vec3 piece_deriv(const CurvePiece& p, double s) {
    return std::visit([s](const auto& q) { return q.deriv(s); }, p);
}

double piece_length(const CurvePiece& p) {
    if (const auto* seg = std::get_if<SegmentPiece>(&p)) return (seg->b - seg->a).norm();
    const auto& arc = std::get<ArcPiece>(p);
    return arc.radius * std::abs(arc.ang1 - arc.ang0);
}

ClosedCurve::ClosedCurve(std::vector<CurvePiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw ConfigError("closed curve needs at least one piece");
    double scale = 0.0;
    Vec3 c{};
    int np = 0;
    for (size_t i = 0; i < pieces_.size(); ++i) {
        Vec3 end = piece_eval(pieces_[i], 1.0);
        Vec3 next = piece_eval(pieces_[(i + 1) % pieces_.size()], 0.0);
        scale = std::max(scale, piece_length(pieces_[i]));
        if ((end - next).norm() > kClosureTol * std::max(1.0, scale))
            throw ConfigError("curve pieces do not close up at junction " + std::to_string(i));
        for (int k = 0; k < 8; ++k) {
            c += piece_eval(pieces_[i], (k + 0.5) / 8.0);
            ++np;
        }
    }
    centroid_ = c / np;
}

ClosedCurve ClosedCurve::circle(const Vec3& center, double radius, const Vec3& u, const Vec3& v) {
    return ClosedCurve({ArcPiece{center, radius, u, v, 0.0, 2.0 * M_PI}});
}

std::vector<Vec3> ClosedCurve::sample_points(int per_piece) const {
    std::vector<Vec3> pts;
    pts.reserve(pieces_.size() * per_piece + 1);
    for (const auto& p : pieces_)
        for (int k = 0; k < per_piece; ++k) pts.push_back(piece_eval(p, double(k) / per_piece));
    pts.push_back(pts.front());
    return pts;
}

simd::CurveNodes ClosedCurve::quadrature_nodes(int level, int nodes_per_panel) const {
    const auto& rule = quad::gauss_legendre(nodes_per_panel);
    const int panels = 1 << level;
    simd::CurveNodes out;
    out.reserve(pieces_.size() * panels * nodes_per_panel);
    for (const auto& p : pieces_) {
        for (int pan = 0; pan < panels; ++pan) {
            double s0 = double(pan) / panels, s1 = double(pan + 1) / panels;
            double c = 0.5 * (s0 + s1), h = 0.5 * (s1 - s0);
            for (int i = 0; i < nodes_per_panel; ++i) {
                double s = c + h * rule.nodes[i];
                out.push(piece_eval(p, s), piece_deriv(p, s) * (rule.weights[i] * h));
            }
        }
    }
    return out;
}

double ClosedCurve::length() const {
    double len = 0.0;
    for (const auto& p : pieces_) len += piece_length(p);
    return len;
}

double ClosedCurve::diameter() const {
    auto pts = sample_points(32);
    double d2 = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); j += 3)
            d2 = std::max(d2, (pts[i] - pts[j]).norm2());
    return std::sqrt(d2);
}

double curve_separation(const ClosedCurve& c1, const ClosedCurve& c2) {
    simd::CurveNodes a = c1.quadrature_nodes(2, 32);
    simd::CurveNodes b = c2.quadrature_nodes(2, 32);
    return std::sqrt(simd::min_pair_dist2(a, b));
}

LinkingResult linking_number(const ClosedCurve& c1, const ClosedCurve& c2,
                             double integer_tol, double refine_tol) {
    double diam = std::max(c1.diameter(), c2.diameter());
    double sep = curve_separation(c1, c2);
    if (sep < 1e-6 * diam)
        throw CurvesTooClose("separation " + std::to_string(sep) + " vs diameter " + std::to_string(diam));

    double prev = 0.0;
    double raw = 0.0;
    const int max_level = 6;
    for (int level = 0;; ++level) {
        simd::CurveNodes a = c1.quadrature_nodes(level);
        simd::CurveNodes b = c2.quadrature_nodes(level);
        raw = simd::pair_link_sum(a, b) / (4.0 * M_PI);
        if (level > 0 && std::abs(raw - prev) < refine_tol) break;
        if (level == max_level) break;
        prev = raw;
    }

    double nearest = std::round(raw);
    if (std::abs(raw - nearest) > integer_tol)
        throw NonIntegerLink("raw value " + std::to_string(raw));
    return {static_cast<int>(nearest), raw};
}

} // namespace abscat
