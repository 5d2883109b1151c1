#ifndef DPGGS_QUADRATURE_HPP
#define DPGGS_QUADRATURE_HPP

#include "common.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace dpg
{

/// Points and positive weights on a reference element. Triangle rules live on
/// the unit triangle {x, y >= 0, x + y <= 1}; edge rules on [0, 1] (y unused).
struct QuadratureRule
{
    std::vector<Point> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

namespace detail
{

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    if (n == 1) {
        w[0] = 2.0;
        return;
    }
    // P_n(t) and P_n'(t)
    auto legendre = [n](double t, double& dp) {
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        return p1;
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double dt = legendre(t, dp) / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16)
                break;
        }
        legendre(t, dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    if (n % 2 == 1)
        x[n / 2] = 0.0;
}

} // namespace detail

inline constexpr int max_quadrature_degree = 30;

/// Gauss-Legendre rule on [0, 1] exact for polynomials up to `degree`.
inline QuadratureRule edge_rule(int degree)
{
    if (degree < 0 || degree > 2 * max_quadrature_degree + 1)
        throw Error("edge_rule: degree " + std::to_string(degree) + " out of range");
    const int n = degree / 2 + 1;
    std::vector<double> x, w;
    detail::gauss_legendre(n, x, w);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        rule.points.emplace_back(0.5 * (x[i] + 1.0), 0.0);
        rule.weights.push_back(0.5 * w[i]);
    }
    return rule;
}

/// Collapsed (Duffy) tensor Gauss rule on the unit triangle, exact to `degree`.
inline QuadratureRule triangle_rule(int degree)
{
    if (degree < 0 || degree > max_quadrature_degree)
        throw Error("triangle_rule: degree " + std::to_string(degree) + " out of range");
    // x = u, y = v (1 - u): the Jacobian (1 - u) raises the u-degree by one
    const int nu = (degree + 2 + 1) / 2;
    const int nv = (degree + 1 + 1) / 2;
    std::vector<double> xu, wu, xv, wv;
    detail::gauss_legendre(nu, xu, wu);
    detail::gauss_legendre(nv, xv, wv);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < nu; ++i) {
        const double u = 0.5 * (xu[i] + 1.0);
        for (int j = 0; j < nv; ++j) {
            const double v = 0.5 * (xv[j] + 1.0);
            rule.points.emplace_back(u, v * (1.0 - u));
            rule.weights.push_back(0.25 * wu[i] * wv[j] * (1.0 - u));
        }
    }
    return rule;
}

} // namespace dpg

#endif // DPGGS_QUADRATURE_HPP
