#include "abscat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace abscat::quad {

namespace {

// Newton iteration on Legendre P_n; nodes seeded with the Chebyshev-like
// approximation from Abramowitz & Stegun 25.4.30.
GaussRule compute_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre: order out of range");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

namespace {

void simpson_rec(const std::function<double(double)>& f, double a, double b,
                 double fa, double fm, double fb, double whole, double tol,
                 int depth, AdaptiveResult& out) {
    double m = 0.5 * (a + b);
    double flm = f(0.5 * (a + m));
    double frm = f(0.5 * (m + b));
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.est_error += std::abs(delta) / 15.0;
        if (depth <= 0 && std::abs(delta) > 15.0 * tol) out.converged = false;
        return;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

} // namespace

AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, int max_depth) {
    AdaptiveResult out;
    if (a == b) return out;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Seed with a few panels so a function supported away from the midpoint
    // is not mistaken for zero.
    const int seed = 8;
    double h = (b - a) / seed;
    for (int i = 0; i < seed; ++i) {
        double x0 = a + i * h, x1 = x0 + h;
        double f0 = (i == 0) ? fa : f(x0);
        double f2 = (i == seed - 1) ? fb : f(x1);
        double f1 = f(0.5 * (x0 + x1));
        double w = (x1 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
        simpson_rec(f, x0, x1, f0, f1, f2, w, abs_tol / seed, max_depth, out);
    }
    (void)whole;
    return out;
}

AdaptiveResult adaptive_right_tail(const std::function<double(double)>& f, double a, double abs_tol) {
    auto g = [&](double s) {
        double u = 1.0 - s;
        double t = a + s / u;
        return f(t) / (u * u);
    };
    return adaptive_simpson(g, 0.0, 1.0 - 1e-9, abs_tol);
}

double pairwise_sum(std::span<const double> v) {
    size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

} // namespace abscat::quad
