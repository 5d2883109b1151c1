#ifndef DPGGS_AMR_HPP
#define DPGGS_AMR_HPP

#include "nonlinear.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dpg
{

struct MarkingParams
{
    double atol_amr = 1e-8;
    double theta_max = 0.025;
    double theta_total = 0.025;
    int max_elements = 200000;
    int max_amr_iters = 10; // refinement steps
};

inline EnergyResidual estimate(const DpgSystem& sys, const Vec& U) { return sys.energy_residual(U); }

/// Elements with E_K > atol, E_K > theta_max max E and
/// E_K > theta_total E_total / sqrt(N).
inline std::vector<int> mark(const Vec& E, const MarkingParams& p)
{
    std::vector<int> marked;
    if (E.size() == 0)
        return marked;
    const double emax = E.maxCoeff();
    const double etotal = E.norm();
    const double avg = p.theta_total * etotal / std::sqrt(double(E.size()));
    for (Eigen::Index t = 0; t < E.size(); ++t)
        if (E[t] > p.atol_amr && E[t] > p.theta_max * emax && E[t] > avg)
            marked.push_back(int(t));
    return marked;
}

namespace detail
{

inline bool contains_point(const Mesh& mesh, int t, const Point& x, double tol = 1e-10)
{
    const ElementGeometry g(mesh, t);
    const Point xi = g.to_reference(x);
    return xi.x() >= -tol && xi.y() >= -tol && xi.x() + xi.y() <= 1.0 + tol;
}

// psi_h and q_h of element t at physical point x.
inline std::array<double, 3> eval_fields_at(const Mesh& mesh, const TrialSpace& space, const Vec& U, int t,
                                            const Point& x)
{
    const ElementGeometry g(mesh, t);
    const ElementFieldValues f = evaluate_element_fields(mesh, space, U, t, {g.to_reference(x)});
    return {f.psi[0], f.qr[0], f.qz[0]};
}

} // namespace detail

/// Initial guess on a refined mesh: interior fields restricted exactly from
/// the parent elements, traces taken from the transferred element fields
/// (averaged over neighbours), boundary values re-interpolated.
inline Vec transfer_solution(const Mesh& old_mesh, const TrialSpace& old_space, const Vec& U_old,
                             const DpgSystem& sys)
{
    const Mesh& mesh = sys.mesh();
    const TrialSpace& space = sys.trial();
    if (space.order() != old_space.order())
        throw Error("transfer_solution: polynomial orders differ");
    if (int(mesh.parents().size()) != mesh.num_triangles())
        throw MeshError("transfer_solution: meshes are not nested");
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const int p = mesh.parent(t);
        if (p < 0 || p >= old_mesh.num_triangles() || !detail::contains_point(old_mesh, p, mesh.centroid(t)))
            throw MeshError("transfer_solution: meshes are not nested (element " + std::to_string(t) + ")");
    }
    const ReferenceTables& tab = sys.tables();
    const int m = space.interior_dim();
    const int k = space.order();
    Vec U = Vec::Zero(space.size());

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry g(mesh, t);
        const int p = mesh.parent(t);
        const ElementGeometry gp(old_mesh, p);
        std::vector<Point> pref(tab.vol.size());
        for (std::size_t q = 0; q < tab.vol.size(); ++q)
            pref[q] = gp.to_reference(g.map(tab.vol.points[q]));
        const ElementFieldValues f = evaluate_element_fields(old_mesh, old_space, U_old, p, pref);
        // L2 projection onto the orthonormal child basis
        Vec w(tab.vol.size());
        for (std::size_t q = 0; q < tab.vol.size(); ++q)
            w[q] = tab.vol.weights[q] * g.det;
        const Mat Ut = g.scale() * tab.trial_val.transpose();
        const Vec cpsi = Ut * w.cwiseProduct(f.psi);
        const Vec cqr = Ut * w.cwiseProduct(f.qr);
        const Vec cqz = Ut * w.cwiseProduct(f.qz);
        for (int i = 0; i < m; ++i) {
            U[space.psi_dof(t, i)] = cpsi[i];
            U[space.q_dof(t, 0, i)] = cqr[i];
            U[space.q_dof(t, 1, i)] = cqz[i];
        }
    }

    const std::vector<double> psi_nodes = gll_nodes(k + 2), qn_nodes = gll_nodes(k + 1);
    std::vector<double> vsum(mesh.num_vertices(), 0.0);
    std::vector<int> vcount(mesh.num_vertices(), 0);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Edge& ed = mesh.edge(e);
        const Point a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
        const int sides = ed.boundary() ? 1 : 2;
        for (int j = 0; j < int(psi_nodes.size()); ++j) {
            const Point x = (1.0 - psi_nodes[j]) * a + psi_nodes[j] * b;
            double v = 0.0;
            for (int s = 0; s < sides; ++s)
                v += detail::eval_fields_at(mesh, space, U, ed.tri[s], x)[0];
            v /= sides;
            if (j == 0 || j == k + 1) {
                const int vert = ed.v[j == 0 ? 0 : 1];
                vsum[vert] += v;
                ++vcount[vert];
            } else {
                U[space.psihat_interior_dof(e, j - 1)] = v;
            }
        }
        for (int j = 0; j < int(qn_nodes.size()); ++j) {
            const Point x = (1.0 - qn_nodes[j]) * a + qn_nodes[j] * b;
            double v = 0.0;
            for (int s = 0; s < sides; ++s) {
                const auto f = detail::eval_fields_at(mesh, space, U, ed.tri[s], x);
                v += f[1] * ed.normal.x() + f[2] * ed.normal.y();
            }
            U[space.qn_dof(e, j)] = v / sides;
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (vcount[v] > 0)
            U[space.psihat_vertex_dof(v)] = vsum[v] / vcount[v];
    sys.apply_boundary(U);
    return U;
}

struct AmrRow
{
    int iter = 0;
    int n_elements = 0;
    double E_total = 0.0;
    int n_marked = 0;
    int nonlinear_iters = 0;
};

struct AmrReport
{
    std::vector<AmrRow> rows;
    std::string termination;
    std::vector<std::vector<int>> marked;           // marked set at each iteration
    std::vector<std::vector<Point>> marked_centroids; // centroids of the marked elements
};

struct AmrResult
{
    AmrReport report;
    Mesh mesh;
    Vec U;
    EnergyResidual estimate;
    std::unique_ptr<DpgSystem> system;
};

struct DiscretizationParams
{
    int k = 2;
    int s = 2;
    TestNormKind norm = TestNormKind::standard;
};

/// solve -> estimate -> mark -> bisect -> transfer, until nothing is marked,
/// the element bound is reached or the iteration budget is spent.
inline AmrResult amr_loop(const ProblemSpec& problem, const Mesh& initial, const DiscretizationParams& disc,
                          const AndersonParams& ap, const LinearSolverParams& lp, const MarkingParams& mp)
{
    AmrResult out;
    auto sys = std::make_unique<DpgSystem>(initial, problem, disc.k, disc.s, disc.norm);
    Vec U0 = sys->initial_guess();
    for (int iter = 0;; ++iter) {
        const NonlinearReport rep = solve_nonlinear(*sys, U0, ap, lp);
        out.U = rep.U;
        if (!rep.converged) {
            out.report.termination = std::string("nonlinear solver failure (") + to_string(rep.reason) + ")";
            out.estimate = estimate(*sys, rep.U);
            out.report.rows.push_back({iter, sys->mesh().num_triangles(), out.estimate.total, 0, rep.iterations});
            break;
        }
        out.estimate = estimate(*sys, rep.U);
        const std::vector<int> marked = mark(out.estimate.per_element, mp);
        out.report.rows.push_back(
            {iter, sys->mesh().num_triangles(), out.estimate.total, int(marked.size()), rep.iterations});
        out.report.marked.push_back(marked);
        std::vector<Point>& centroids = out.report.marked_centroids.emplace_back();
        for (int t : marked)
            centroids.push_back(sys->mesh().centroid(t));
        if (marked.empty()) {
            out.report.termination = "no element marked";
            break;
        }
        if (sys->mesh().num_triangles() >= mp.max_elements) {
            out.report.termination = "element limit reached";
            break;
        }
        if (iter >= mp.max_amr_iters) {
            out.report.termination = "iteration limit reached";
            break;
        }
        Mesh refined = bisect_conforming(sys->mesh(), marked);
        auto next = std::make_unique<DpgSystem>(std::move(refined), problem, disc.k, disc.s, disc.norm);
        U0 = transfer_solution(sys->mesh(), sys->trial(), rep.U, *next);
        sys = std::move(next);
    }
    out.mesh = sys->mesh();
    out.system = std::move(sys);
    return out;
}

/// (element count, E_total) under repeated uniform refinement.
inline std::vector<AmrRow> uniform_refinement_history(const ProblemSpec& problem, const Mesh& initial,
                                                      const DiscretizationParams& disc, const AndersonParams& ap,
                                                      const LinearSolverParams& lp, int levels)
{
    std::vector<AmrRow> rows;
    auto sys = std::make_unique<DpgSystem>(initial, problem, disc.k, disc.s, disc.norm);
    Vec U0 = sys->initial_guess();
    for (int l = 0; l < levels; ++l) {
        const NonlinearReport rep = solve_nonlinear(*sys, U0, ap, lp);
        if (!rep.converged)
            throw SolverError("uniform refinement: nonlinear solve failed on level " + std::to_string(l));
        rows.push_back({l, sys->mesh().num_triangles(), estimate(*sys, rep.U).total, 0, rep.iterations});
        if (l + 1 == levels)
            break;
        auto next = std::make_unique<DpgSystem>(uniform_refine(sys->mesh()), problem, disc.k, disc.s, disc.norm);
        U0 = transfer_solution(sys->mesh(), sys->trial(), rep.U, *next);
        sys = std::move(next);
    }
    return rows;
}

} // namespace dpg

#endif // DPGGS_AMR_HPP
