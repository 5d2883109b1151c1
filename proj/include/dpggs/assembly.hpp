#ifndef DPGGS_ASSEMBLY_HPP
#define DPGGS_ASSEMBLY_HPP

#include "problems.hpp"
#include "quadrature.hpp"
#include "shapes.hpp"
#include "spaces.hpp"

#include <cmath>
#include <sstream>

namespace dpg
{

enum class TestNormKind
{
    standard,      // |phi|^2 + |div phi|^2 + |tau|^2 + |grad tau|^2
    adjoint_graph  // |r phi - grad tau|^2 + |div phi|^2 + |phi|^2 + |tau|^2
};

inline int volume_quadrature_degree(int k, int s) { return 2 * (k + s) + 3; }
inline int edge_quadrature_degree(int k, int s) { return 2 * (k + s) + 2; }

/// Reference-element tables shared by every element of a given (k, s).
struct ReferenceTables
{
    int k = 0, s = 0;
    QuadratureRule vol, edge;
    Mat trial_val, trial_dx, trial_dy; // nq x dim P^k (reference gradients)
    Mat test_val, test_dx, test_dy;    // nq x dim P^{k+s}
    std::array<Mat, 3> edge_test;      // per local edge: nqe x dim P^{k+s}
    std::array<Mat, 3> edge_trial;     // per local edge: nqe x dim P^k
    std::array<Mat, 2> qn_val;         // [forward, reversed]: nqe x (k+1)
    std::array<Mat, 2> psihat_val;     // [forward, reversed]: nqe x (k+2)

    ReferenceTables() = default;

    ReferenceTables(int k_, int s_)
        : k(k_), s(s_), vol(triangle_rule(volume_quadrature_degree(k_, s_))),
          edge(edge_rule(edge_quadrature_degree(k_, s_)))
    {
        const ModalTriangleBasis trial(k), test(k + s);
        tabulate(trial, vol.points, trial_val, trial_dx, trial_dy);
        tabulate(test, vol.points, test_val, test_dx, test_dy);
        const std::array<Point, 3> V{Point(0, 0), Point(1, 0), Point(0, 1)};
        const int nqe = int(edge.size());
        for (int i = 0; i < 3; ++i) {
            std::vector<Point> pts(nqe);
            for (int q = 0; q < nqe; ++q) {
                const double t = edge.points[q].x();
                pts[q] = (1.0 - t) * V[(i + 1) % 3] + t * V[(i + 2) % 3];
            }
            Mat dx, dy;
            tabulate(test, pts, edge_test[i], dx, dy);
            tabulate(trial, pts, edge_trial[i], dx, dy);
        }
        const NodalEdgeBasis qn(k), ph(k + 1);
        for (int dir = 0; dir < 2; ++dir) {
            qn_val[dir].resize(nqe, qn.size());
            psihat_val[dir].resize(nqe, ph.size());
            for (int q = 0; q < nqe; ++q) {
                const double t = edge.points[q].x();
                const double tg = dir == 0 ? t : 1.0 - t;
                qn_val[dir].row(q) = qn.values(tg).transpose();
                psihat_val[dir].row(q) = ph.values(tg).transpose();
            }
        }
    }

    static void tabulate(const ModalTriangleBasis& b, const std::vector<Point>& pts, Mat& val, Mat& dx, Mat& dy)
    {
        const int n = b.size();
        val.resize(pts.size(), n);
        dx.resize(pts.size(), n);
        dy.resize(pts.size(), n);
        Vec v(n);
        Mat g(n, 2);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            b.eval(pts[q], v, g);
            val.row(q) = v.transpose();
            dx.row(q) = g.col(0).transpose();
            dy.row(q) = g.col(1).transpose();
        }
    }
};

/// Affine map x = x0 + J xi of a mesh triangle. Modal functions on the
/// physical element carry the factor 1 / sqrt(det J) so they stay orthonormal.
struct ElementGeometry
{
    Point x0;
    Eigen::Matrix2d J, Jinv;
    double det = 0.0;

    ElementGeometry() = default;

    ElementGeometry(const Mesh& mesh, int t)
    {
        const auto& tv = mesh.triangle(t);
        x0 = mesh.vertex(tv[0]);
        J.col(0) = mesh.vertex(tv[1]) - x0;
        J.col(1) = mesh.vertex(tv[2]) - x0;
        det = J.determinant();
        Jinv = J.inverse();
    }

    Point map(const Point& xi) const { return x0 + J * xi; }
    Point to_reference(const Point& x) const { return Jinv * (x - x0); }
    double scale() const { return 1.0 / std::sqrt(det); }
};

/// Physical values and gradients of scaled modal functions at quadrature points.
struct PhysicalTable
{
    Mat val, dr, dz;
};

inline PhysicalTable physical_table(const ElementGeometry& g, const Mat& val, const Mat& dx, const Mat& dy)
{
    const double c = g.scale();
    // grad = J^{-T} grad_ref
    PhysicalTable p;
    p.val = c * val;
    p.dr = c * (g.Jinv(0, 0) * dx + g.Jinv(1, 0) * dy);
    p.dz = c * (g.Jinv(0, 1) * dx + g.Jinv(1, 1) * dy);
    return p;
}

/// Element block B_K (test x local trial) of the ultraweak form:
///   phi rows: (r q, phi) - (psi, div phi) + <psihat, n . phi>
///   tau rows: -(q, grad tau) + <qn, tau>
inline Mat assemble_element_B(const Mesh& mesh, int t, const TrialSpace& trial, const TestSpace& test,
                              const ReferenceTables& tab)
{
    const ElementGeometry g(mesh, t);
    const PhysicalTable U = physical_table(g, tab.trial_val, tab.trial_dx, tab.trial_dy);
    const PhysicalTable V = physical_table(g, tab.test_val, tab.test_dx, tab.test_dy);
    const int nq = int(tab.vol.size());
    Vec w(nq), wr(nq);
    for (int q = 0; q < nq; ++q) {
        w[q] = tab.vol.weights[q] * g.det;
        wr[q] = w[q] * g.map(tab.vol.points[q]).x();
    }
    const int m = trial.interior_dim(), n = test.scalar_dim(), k = trial.order();
    Mat B = Mat::Zero(test.local_size(), trial.local_size());
    const Mat rq = V.val.transpose() * wr.asDiagonal() * U.val;
    const Mat gr = V.dr.transpose() * w.asDiagonal() * U.val;
    const Mat gz = V.dz.transpose() * w.asDiagonal() * U.val;
    B.block(test.local_phi(0), trial.local_q(0), n, m) = rq;
    B.block(test.local_phi(1), trial.local_q(1), n, m) = rq;
    B.block(test.local_phi(0), trial.local_psi(), n, m) = -gr;
    B.block(test.local_phi(1), trial.local_psi(), n, m) = -gz;
    B.block(test.local_tau(), trial.local_q(0), n, m) = -gr;
    B.block(test.local_tau(), trial.local_q(1), n, m) = -gz;

    const int nqe = int(tab.edge.size());
    for (int i = 0; i < 3; ++i) {
        const Edge& e = mesh.edge(mesh.tri_edges(t)[i]);
        const int sign = mesh.tri_signs(t)[i];
        const int dir = sign > 0 ? 0 : 1;
        const Point n_out = double(sign) * e.normal;
        const Mat Ve = g.scale() * tab.edge_test[i];
        Vec we(nqe);
        for (int q = 0; q < nqe; ++q)
            we[q] = tab.edge.weights[q] * e.length;
        // psihat nodes are numbered along the global edge direction
        const Mat ph = Ve.transpose() * we.asDiagonal() * tab.psihat_val[dir];
        for (int node = 0; node <= k + 1; ++node) {
            const int col = trial.local_psihat_node(mesh, t, i, node);
            B.block(test.local_phi(0), col, n, 1) += n_out.x() * ph.col(node);
            B.block(test.local_phi(1), col, n, 1) += n_out.y() * ph.col(node);
        }
        const Mat qn = Ve.transpose() * we.asDiagonal() * tab.qn_val[dir];
        B.block(test.local_tau(), trial.local_qn(i), n, k + 1) += double(sign) * qn;
    }
    return B;
}

/// Element Gram matrix of the chosen test norm.
inline Mat assemble_element_gram(const Mesh& mesh, int t, const TestSpace& test, const ReferenceTables& tab,
                                 TestNormKind norm = TestNormKind::standard)
{
    const ElementGeometry g(mesh, t);
    const PhysicalTable V = physical_table(g, tab.test_val, tab.test_dx, tab.test_dy);
    const int nq = int(tab.vol.size());
    Vec w(nq), wr(nq), wr2(nq);
    for (int q = 0; q < nq; ++q) {
        const double r = g.map(tab.vol.points[q]).x();
        w[q] = tab.vol.weights[q] * g.det;
        wr[q] = w[q] * r;
        wr2[q] = wr[q] * r;
    }
    const int n = test.scalar_dim();
    const int P0 = test.local_phi(0), P1 = test.local_phi(1), T = test.local_tau();
    Mat G = Mat::Zero(test.local_size(), test.local_size());
    const Mat mass = V.val.transpose() * w.asDiagonal() * V.val;
    const Mat drdr = V.dr.transpose() * w.asDiagonal() * V.dr;
    const Mat dzdz = V.dz.transpose() * w.asDiagonal() * V.dz;
    const Mat drdz = V.dr.transpose() * w.asDiagonal() * V.dz;
    // div phi . div phi
    G.block(P0, P0, n, n) = drdr;
    G.block(P1, P1, n, n) = dzdz;
    G.block(P0, P1, n, n) = drdz;
    G.block(P1, P0, n, n) = drdz.transpose();
    G.block(P0, P0, n, n) += mass;
    G.block(P1, P1, n, n) += mass;
    G.block(T, T, n, n) = mass + drdr + dzdz;
    if (norm == TestNormKind::adjoint_graph) {
        const Mat r2mass = V.val.transpose() * wr2.asDiagonal() * V.val;
        const Mat rvr = V.val.transpose() * wr.asDiagonal() * V.dr;
        const Mat rvz = V.val.transpose() * wr.asDiagonal() * V.dz;
        G.block(P0, P0, n, n) += r2mass;
        G.block(P1, P1, n, n) += r2mass;
        G.block(P0, T, n, n) = -rvr;
        G.block(P1, T, n, n) = -rvz;
        G.block(T, P0, n, n) = -rvr.transpose();
        G.block(T, P1, n, n) = -rvz.transpose();
    }
    return G;
}

/// Cholesky factor of an element Gram matrix; throws if it is not SPD.
inline Eigen::LLT<Mat> factor_gram(const Mat& G, int t)
{
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success)
        throw SolverError("Gram matrix of element " + std::to_string(t) + " is not positive definite");
    return llt;
}

/// tau-moments of the source terms on one element.
struct ElementSource
{
    Vec N; // (F_N(psi_h) / r, tau_i)
    Mat D; // (dF_N(psi_h) / r u_j, tau_i), tau x psi
    Vec L; // (F_L / r, tau_i)
};

inline ElementSource assemble_element_source(const Mesh& mesh, int t, const Vec& psi_local,
                                             const ProblemSpec& problem, const ReferenceTables& tab,
                                             bool with_linear = true)
{
    const ElementGeometry g(mesh, t);
    const double c = g.scale();
    const int nq = int(tab.vol.size());
    const Vec psi_q = c * (tab.trial_val * psi_local);
    Vec wn(nq), wd(nq), wl(nq);
    for (int q = 0; q < nq; ++q) {
        const Point x = g.map(tab.vol.points[q]);
        const double w = tab.vol.weights[q] * g.det / x.x();
        const double fn = problem.F_N(x.x(), x.y(), psi_q[q]);
        const double dfn = problem.dF_N(x.x(), x.y(), psi_q[q]);
        const double fl = with_linear ? problem.F_L(x.x(), x.y()) : 0.0;
        if (!std::isfinite(fn) || !std::isfinite(dfn) || !std::isfinite(fl)) {
            std::ostringstream os;
            os << "non-finite source value on element " << t << " at quadrature point " << q << " (r=" << x.x()
               << ", z=" << x.y() << ", psi=" << psi_q[q] << ")";
            throw SolverError(os.str());
        }
        wn[q] = w * fn;
        wd[q] = w * dfn;
        wl[q] = w * fl;
    }
    ElementSource src;
    const Mat Vt = c * tab.test_val.transpose();
    src.N = Vt * wn;
    src.L = Vt * wl;
    src.D = Vt * wd.asDiagonal() * (c * tab.trial_val);
    return src;
}

// ---------------------------------------------------------------------------
// Evaluation of discrete fields

/// Values of psi_h and q_h at reference points of element t.
struct ElementFieldValues
{
    Vec psi, qr, qz;
};

inline ElementFieldValues evaluate_element_fields(const Mesh& mesh, const TrialSpace& space, const Vec& U, int t,
                                                  const std::vector<Point>& ref_points)
{
    const ElementGeometry g(mesh, t);
    const ModalTriangleBasis basis(space.order());
    const int m = basis.size();
    const Vec u = space.gather(U, t);
    ElementFieldValues f;
    f.psi.resize(ref_points.size());
    f.qr.resize(ref_points.size());
    f.qz.resize(ref_points.size());
    Vec v(m);
    Mat gr(m, 2);
    for (std::size_t p = 0; p < ref_points.size(); ++p) {
        basis.eval(ref_points[p], v, gr);
        v *= g.scale();
        f.qr[p] = v.dot(u.segment(space.local_q(0), m));
        f.qz[p] = v.dot(u.segment(space.local_q(1), m));
        f.psi[p] = v.dot(u.segment(space.local_psi(), m));
    }
    return f;
}

struct LinfErrors
{
    double psi = 0.0;
    double q = 0.0;
};

/// Elementwise maximum error over the volume quadrature points plus the
/// three vertices of every element; q takes the worst component.
inline LinfErrors linf_error(const Mesh& mesh, const TrialSpace& space, const Vec& U, const ExactSolution& exact,
                             int s = 2)
{
    if (!exact.psi || !exact.q)
        throw Error("linf_error: exact solution not available");
    std::vector<Point> pts = triangle_rule(volume_quadrature_degree(space.order(), s)).points;
    pts.push_back(Point(0, 0));
    pts.push_back(Point(1, 0));
    pts.push_back(Point(0, 1));
    LinfErrors e;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry g(mesh, t);
        const ElementFieldValues f = evaluate_element_fields(mesh, space, U, t, pts);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const Point x = g.map(pts[p]);
            const Point q = exact.q(x.x(), x.y());
            e.psi = std::max(e.psi, std::abs(f.psi[p] - exact.psi(x.x(), x.y())));
            e.q = std::max({e.q, std::abs(f.qr[p] - q.x()), std::abs(f.qz[p] - q.y())});
        }
    }
    return e;
}

} // namespace dpg

#endif // DPGGS_ASSEMBLY_HPP
