#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace kmlift {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on P_n), cached.
const GaussRule& gauss_legendre(int n);

template <class V>
struct QuadratureResult {
    V value{};
    double error_estimate = 0;
    int evaluations = 0;
};

/// Composite Gauss-Legendre over equal panels.
template <class V, class F>
V integrate_panels(F&& f, double a, double b, int panels, int order = 20) {
    const GaussRule& rule = gauss_legendre(order);
    V sum{};
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * h, mid = lo + h / 2;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            sum += rule.weights[i] * (h / 2) * f(mid + (h / 2) * rule.nodes[i]);
    }
    return sum;
}

/// Adaptive bisection with a 20-point rule per panel; a panel is accepted when the halves agree to tol * (b-a)/L.
template <class V, class F>
QuadratureResult<V> integrate_adaptive(F&& f, double a, double b, double tol, int max_depth = 30) {
    QuadratureResult<V> out;
    const double total = b - a;
    std::function<V(double, double, V, int)> rec = [&](double lo, double hi, V whole, int depth) -> V {
        const double mid = (lo + hi) / 2;
        const V left = integrate_panels<V>(f, lo, mid, 1), right = integrate_panels<V>(f, mid, hi, 1);
        out.evaluations += 40;
        const double diff = std::abs(left + right - whole);
        if (diff <= tol * (hi - lo) / total || depth >= max_depth) {
            out.error_estimate += diff;
            return left + right;
        }
        return rec(lo, mid, left, depth + 1) + rec(mid, hi, right, depth + 1);
    };
    const V first = integrate_panels<V>(f, a, b, 1);
    out.evaluations = 20;
    out.value = rec(a, b, first, 0);
    return out;
}

/// Integral over (0, inf) through y = exp(t) and the trapezoid rule on t in [t_lo, t_hi], halving the step until
/// two successive results agree to tol (relative to the larger magnitude, floored at 1).
template <class V, class F>
QuadratureResult<V> integrate_half_line(F&& f, double tol, double t_lo = -40.0, double t_hi = 12.0) {
    QuadratureResult<V> out;
    auto g = [&](double t) {
        const double y = std::exp(t);
        return f(y) * y;
    };
    double h = 0.5;
    V prev{};
    {
        V s{};
        for (double t = t_lo; t <= t_hi + 1e-12; t += h) s += g(t);
        prev = s * h;
        out.evaluations += static_cast<int>((t_hi - t_lo) / h) + 1;
    }
    for (int level = 0; level < 14; ++level) {
        // add midpoints
        V s{};
        for (double t = t_lo + h / 2; t < t_hi; t += h) s += g(t);
        out.evaluations += static_cast<int>((t_hi - t_lo) / h);
        const V next = prev / 2.0 + s * (h / 2);
        h /= 2;
        const double scale = std::max(1.0, std::max(std::abs(next), std::abs(prev)));
        out.error_estimate = std::abs(next - prev);
        prev = next;
        if (out.error_estimate <= tol * scale && level >= 2) break;
    }
    out.value = prev;
    return out;
}

}  // namespace kmlift
