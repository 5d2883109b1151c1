#ifndef DPGGS_SHAPES_HPP
#define DPGGS_SHAPES_HPP

#include "common.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace dpg
{

namespace detail
{

// Value with its gradient in the reference coordinates (x, y).
struct Dual
{
    double v = 0.0, dx = 0.0, dy = 0.0;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
inline Dual operator*(double s, Dual a) { return {s * a.v, s * a.dx, s * a.dy}; }
inline Dual operator*(Dual a, Dual b)
{
    return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
}

} // namespace detail

/// Orthonormal (Dubiner) basis of P^k on the unit triangle, ordered by total
/// degree. Evaluation uses the homogeneous (scaled) form of the collapsed
/// Legendre factor so the top vertex needs no special case.
class ModalTriangleBasis
{
public:
    explicit ModalTriangleBasis(int order) : order_(order)
    {
        if (order < 0)
            throw Error("ModalTriangleBasis: negative order");
    }

    int order() const { return order_; }
    int size() const { return dim_p(order_); }

    /// Fills `values` (size()) and `grads` (size() x 2, reference gradients).
    void eval(const Point& xi, Eigen::Ref<Vec> values, Eigen::Ref<Mat> grads) const
    {
        using detail::Dual;
        const int k = order_;
        const Dual x{xi.x(), 1.0, 0.0};
        const Dual y{xi.y(), 0.0, 1.0};
        const Dual one{1.0, 0.0, 0.0};
        const Dual u = 2.0 * x + y - one; // s * a, a the collapsed coordinate
        const Dual s = one - y;
        const Dual b = 2.0 * y - one;

        // scaled Legendre: Q_p = s^p P_p(u / s)
        std::vector<Dual> Q(k + 1);
        Q[0] = one;
        if (k >= 1)
            Q[1] = u;
        for (int n = 1; n < k; ++n)
            Q[n + 1] = (1.0 / (n + 1)) * ((2.0 * n + 1.0) * u * Q[n] - double(n) * (s * s) * Q[n - 1]);

        int idx = 0;
        std::vector<Dual> P(k + 1);
        for (int d = 0; d <= k; ++d) {
            for (int p = d; p >= 0; --p) {
                const int q = d - p;
                jacobi(2 * p + 1, q, b, P);
                const double c = std::sqrt((2.0 * p + 1.0) * (2.0 * p + 2.0 * q + 2.0));
                const Dual f = c * (Q[p] * P[q]);
                values[idx] = f.v;
                grads(idx, 0) = f.dx;
                grads(idx, 1) = f.dy;
                ++idx;
            }
        }
    }

private:
    // P_n^{(alpha, 0)}(b) for n = 0..nmax
    static void jacobi(int alpha, int nmax, detail::Dual b, std::vector<detail::Dual>& P)
    {
        using detail::Dual;
        const Dual one{1.0, 0.0, 0.0};
        P[0] = one;
        if (nmax == 0)
            return;
        const double a = alpha;
        P[1] = (a + 1.0) * one + 0.5 * (a + 2.0) * (b - one);
        for (int n = 2; n <= nmax; ++n) {
            const double c = 2.0 * n + a;
            const double a1 = 2.0 * n * (n + a) * (c - 2.0);
            const double a2 = (c - 1.0) * a * a;
            const double a3 = (c - 1.0) * c * (c - 2.0);
            const double a4 = 2.0 * (n + a - 1.0) * (n - 1.0) * c;
            P[n] = (1.0 / a1) * ((a2 * one + a3 * b) * P[n - 1] - a4 * P[n - 2]);
        }
    }

    int order_;
};

/// Gauss-Lobatto-Legendre nodes on [0, 1] (n >= 2 points, endpoints included).
inline std::vector<double> gll_nodes(int n)
{
    if (n < 2)
        throw Error("gll_nodes: need at least two nodes");
    const int N = n - 1;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        double t = -std::cos(std::numbers::pi * i / N);
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= N; ++j) {
                const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (N == 1)
                p0 = 1.0;
            const double dt = (t * p1 - p0) / ((N + 1) * p1);
            t -= dt;
            if (std::abs(dt) < 1e-16)
                break;
        }
        x[i] = 0.5 * (t + 1.0);
    }
    x.front() = 0.0;
    x.back() = 1.0;
    return x;
}

/// Lagrange basis of P^{n-1} on [0, 1] through GLL nodes.
class NodalEdgeBasis
{
public:
    explicit NodalEdgeBasis(int order) : order_(order), nodes_(gll_nodes(order + 1)) {}

    int order() const { return order_; }
    int size() const { return order_ + 1; }
    const std::vector<double>& nodes() const { return nodes_; }

    void eval(double t, Eigen::Ref<Vec> values, Eigen::Ref<Vec> derivs) const
    {
        const int n = size();
        for (int i = 0; i < n; ++i) {
            double v = 1.0, d = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                const double den = nodes_[i] - nodes_[j];
                d = d * (t - nodes_[j]) / den + v / den;
                v *= (t - nodes_[j]) / den;
            }
            values[i] = v;
            derivs[i] = d;
        }
    }

    Vec values(double t) const
    {
        Vec v(size()), d(size());
        eval(t, v, d);
        return v;
    }

private:
    int order_;
    std::vector<double> nodes_;
};

} // namespace dpg

#endif // DPGGS_SHAPES_HPP
