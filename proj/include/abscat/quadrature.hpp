#pragma once

#include <functional>
#include <span>
#include <vector>

namespace abscat::quad {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule with n points, computed once and cached.
const GaussRule& gauss_legendre(int n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double gauss(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

struct AdaptiveResult {
    double value = 0.0;
    double est_error = 0.0;
    bool converged = true;
};

// Adaptive Simpson on [a, b] with absolute tolerance.
AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, int max_depth = 48);

// Improper integral of f over [a, +inf) via the substitution t = a + s/(1-s).
AdaptiveResult adaptive_right_tail(const std::function<double(double)>& f, double a, double abs_tol);

// Pairwise (cascade) summation; deterministic and accurate for long sums.
double pairwise_sum(std::span<const double> v);

} // namespace abscat::quad
