#ifndef DPGGS_TESTS_HELPERS_HPP
#define DPGGS_TESTS_HELPERS_HPP

#include "dpggs/dpggs.hpp"

#include <random>

namespace dpg::testing
{

// Unit square [1,2] x [0,1] split along one diagonal.
inline Mesh two_triangle_square()
{
    return Mesh::from_triangles({Point(1, 0), Point(2, 0), Point(2, 1), Point(1, 1)}, {{0, 1, 2}, {0, 2, 3}});
}

inline Mesh single_triangle()
{
    return Mesh::from_triangles({Point(1, 0), Point(2, 0), Point(1, 1)}, {{0, 1, 2}});
}

// Linear test problem on a rectangle with prescribed sources.
inline ProblemSpec rectangle_problem(ScalarField F_L, SourceField F_N, SourceField dF_N, ScalarField psi_D,
                                     bool linear)
{
    ProblemSpec p;
    p.name = "test_rectangle";
    p.boundary = rectangle_curve(1.0, 2.0, 0.0, 1.0);
    p.F_L = std::move(F_L);
    p.F_N = std::move(F_N);
    p.dF_N = std::move(dF_N);
    p.psi_D = std::move(psi_D);
    p.linear = linear;
    p.resolution = {2, 2};
    return p;
}

inline ProblemSpec linear_rectangle_problem()
{
    return rectangle_problem([](double r, double) { return r * r; }, [](double, double, double) { return 0.0; },
                             [](double, double, double) { return 0.0; }, [](double r, double) { return 0.1 * r; },
                             true);
}

inline ProblemSpec nonlinear_rectangle_problem()
{
    return rectangle_problem([](double r, double z) { return r * r + z; },
                             [](double r, double, double psi) { return r * (psi * psi + std::sin(psi)); },
                             [](double r, double, double psi) { return r * (2.0 * psi + std::cos(psi)); },
                             [](double r, double z) { return 0.1 * r + 0.05 * z; }, false);
}

using Poly = std::function<double(double, double)>;
using VecPoly = std::function<Point(double, double)>;

// L2 projection onto the scaled modal basis of element t (exact for P^k data).
inline Vec project(const Mesh& m, int t, int k, const Poly& f)
{
    const ElementGeometry g(m, t);
    const ModalTriangleBasis b(k);
    const QuadratureRule q = triangle_rule(2 * k + 8);
    Vec c = Vec::Zero(b.size()), v(b.size());
    Mat gr(b.size(), 2);
    for (std::size_t i = 0; i < q.size(); ++i) {
        b.eval(q.points[i], v, gr);
        const Point x = g.map(q.points[i]);
        c += q.weights[i] * g.det * f(x.x(), x.y()) * g.scale() * v;
    }
    return c;
}

// Trial vector whose fields are the polynomials psi and Q with matching traces.
inline Vec polynomial_field(const Mesh& m, const TrialSpace& s, const Poly& psi, const VecPoly& Q)
{
    const int k = s.order();
    Vec U = Vec::Zero(s.size());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const Vec cp = project(m, t, k, psi);
        const Vec cr = project(m, t, k, [&](double r, double z) { return Q(r, z).x(); });
        const Vec cz = project(m, t, k, [&](double r, double z) { return Q(r, z).y(); });
        for (int i = 0; i < s.interior_dim(); ++i) {
            U[s.psi_dof(t, i)] = cp[i];
            U[s.q_dof(t, 0, i)] = cr[i];
            U[s.q_dof(t, 1, i)] = cz[i];
        }
    }
    const auto qn_nodes = gll_nodes(k + 1), ph_nodes = gll_nodes(k + 2);
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edge(e);
        const Point a = m.vertex(ed.v[0]), b = m.vertex(ed.v[1]);
        for (int j = 0; j <= k; ++j) {
            const Point x = (1.0 - qn_nodes[j]) * a + qn_nodes[j] * b;
            U[s.qn_dof(e, j)] = Q(x.x(), x.y()).dot(ed.normal);
        }
        for (int j = 0; j <= k + 1; ++j) {
            const Point x = (1.0 - ph_nodes[j]) * a + ph_nodes[j] * b;
            U[s.psihat_node_dof(m, e, j)] = psi(x.x(), x.y());
        }
    }
    return U;
}

inline Vec random_vector(int n, unsigned seed, double scale = 1.0)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> d(-scale, scale);
    Vec v(n);
    for (int i = 0; i < n; ++i)
        v[i] = d(gen);
    return v;
}

inline double rel_diff(const Mat& a, const Mat& b)
{
    const double s = std::max(a.norm(), b.norm());
    return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

} // namespace dpg::testing

#endif // DPGGS_TESTS_HELPERS_HPP
