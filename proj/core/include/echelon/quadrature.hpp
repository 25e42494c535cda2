#pragma once

#include <cstddef>
#include <vector>

namespace echelon {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes/weights for an n-point Gauss-Legendre rule. Rules are computed once
/// and cached per n; the returned reference stays valid for program lifetime.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
double integrate_gl(F&& f, double a, double b, std::size_t n = 128) {
    const GaussLegendreRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

} // namespace echelon
