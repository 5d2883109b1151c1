#ifndef DPGGS_NONLINEAR_HPP
#define DPGGS_NONLINEAR_HPP

#include "anderson.hpp"
#include "dpg_system.hpp"
#include "krylov.hpp"

#include <memory>
#include <optional>

namespace dpg
{

enum class InnerSolverKind
{
    gmres,  // FGMRES with the block Jacobi preconditioner
    direct  // sparse LU of the full normal matrix
};

struct LinearSolverParams
{
    InnerSolverKind kind = InnerSolverKind::gmres;
    KrylovParams krylov{100, 1e-10, 500};
    bool direct_fallback = true; // sparse LU when GMRES does not converge
};

/// Solves a constrained normal system with the configured inner solver.
/// The block Jacobi preconditioner is built once from the linear part. When
/// preconditioned GMRES fails (strongly nonlinear sources make the Picard
/// matrix far from its linear part) the solver switches to sparse LU for the
/// rest of its lifetime.
class NormalSolver
{
public:
    NormalSolver(const DpgSystem& sys, LinearSolverParams params) : sys_(sys), params_(params) {}

    Vec solve(const NormalSystem& ns, const Vec* guess = nullptr)
    {
        if (params_.kind == InnerSolverKind::direct || switched_to_direct_) {
            DirectSolver lu(ns.A);
            return lu.solve(ns.b);
        }
        if (!precond_)
            precond_.emplace(sys_.preconditioner());
        LinearOperator A = [&ns](const Vec& x, Vec& y) { y = ns.A * x; };
        LinearOperator P = [this](const Vec& x, Vec& y) { precond_->apply(x, y); };
        // Solve for the correction to the guess so the tolerance is relative
        // to the current residual rather than to the right-hand side.
        Vec rhs = ns.b;
        if (guess)
            rhs -= ns.A * *guess;
        KrylovResult r = gmres(A, rhs, P, params_.krylov);
        krylov_iterations_ += r.iterations;
        last_iterations_ = r.iterations;
        if (r.converged)
            return guess ? Vec(*guess + r.x) : r.x;
        if (!params_.direct_fallback)
            throw SolverError("inner GMRES did not converge: relative residual " + std::to_string(r.residual) +
                              " after " + std::to_string(r.iterations) + " iterations");
        switched_to_direct_ = true;
        DirectSolver lu(ns.A);
        return lu.solve(ns.b);
    }

    int krylov_iterations() const { return krylov_iterations_; }
    int last_iterations() const { return last_iterations_; }
    bool switched_to_direct() const { return switched_to_direct_; }
    const LinearSolverParams& params() const { return params_; }

private:
    const DpgSystem& sys_;
    LinearSolverParams params_;
    std::optional<BlockJacobiPreconditioner> precond_;
    int krylov_iterations_ = 0;
    int last_iterations_ = 0;
    bool switched_to_direct_ = false;
};

/// The fixed-point map A(U) = (J^T G^-1 B)^-1 J^T G^-1 [0; N(U) + L], J at U.
/// For a linear problem the map is constant and evaluated once.
class PicardMap
{
public:
    PicardMap(const DpgSystem& sys, LinearSolverParams params = {}) : sys_(sys), solver_(sys, params) {}

    Vec operator()(const Vec& U)
    {
        ++evaluations_;
        if (sys_.problem().linear && constant_)
            return *constant_;
        const NormalSystem ns = sys_.normal_system(U, NormalMode::picard);
        Vec guess = U;
        sys_.apply_boundary(guess);
        Vec out = solver_.solve(ns, &guess);
        if (sys_.problem().linear)
            constant_ = out;
        return out;
    }

    int evaluations() const { return evaluations_; }
    int krylov_iterations() const { return solver_.krylov_iterations(); }
    bool switched_to_direct() const { return solver_.switched_to_direct(); }

private:
    const DpgSystem& sys_;
    NormalSolver solver_;
    std::optional<Vec> constant_;
    int evaluations_ = 0;
};

inline Vec fixed_point_apply(const DpgSystem& sys, const Vec& U, LinearSolverParams params = {})
{
    PicardMap map(sys, params);
    return map(U);
}

struct NonlinearReport
{
    Vec U;
    bool converged = false;
    StopReason reason = StopReason::max_iters;
    int iterations = 0;
    int map_evaluations = 0;
    int krylov_iterations = 0;
    bool direct_fallback_used = false;
    double normal_residual0 = 0.0;
    double normal_residual = 0.0;
    std::vector<double> residual_norms;
};

/// Anderson-accelerated Picard solve starting from U0 (boundary values are
/// installed before the first iteration).
inline NonlinearReport solve_nonlinear(const DpgSystem& sys, Vec U0, const AndersonParams& ap,
                                       const LinearSolverParams& lp = {})
{
    sys.apply_boundary(U0);
    PicardMap map(sys, lp);
    NonlinearReport rep;
    rep.normal_residual0 = sys.normal_residual(U0).norm();
    const AndersonResult ar = anderson_solve([&map](const Vec& x) { return map(x); }, U0, ap);
    rep.U = ar.x;
    rep.converged = ar.converged;
    rep.reason = ar.reason;
    rep.iterations = ar.iterations;
    rep.map_evaluations = ar.map_evaluations;
    rep.krylov_iterations = map.krylov_iterations();
    rep.direct_fallback_used = map.switched_to_direct();
    rep.residual_norms = ar.residual_norms;
    rep.normal_residual = sys.normal_residual(rep.U).norm();
    return rep;
}

// ---------------------------------------------------------------------------
// Jacobian-free Newton-Krylov on the normal equations G(U) = J^T G^-1 r = 0

struct JfnkParams
{
    double rtol = 1e-8;
    double atol = 1e-10;
    int max_newton = 30;
    KrylovParams krylov{100, 1e-10, 1000};
};

struct JfnkReport
{
    Vec U;
    bool converged = false;
    int iterations = 0;
    int krylov_iterations = 0;
    std::vector<double> residual_norms;
    std::string status;
};

/// Directional difference (G(U + eps V) - G(U)) / eps with
/// eps = 1e-7 (1 + |U|) / |V|. Constrained entries of V are ignored.
inline Vec jfnk_directional(const DpgSystem& sys, const Vec& U, const Vec& G0, const Vec& V)
{
    const double vn = V.norm();
    if (vn == 0.0)
        return Vec::Zero(V.size());
    const double eps = 1e-7 * (1.0 + U.norm()) / vn;
    Vec Up = U + eps * V;
    sys.apply_boundary(Up);
    return (sys.normal_residual(Up) - G0) / eps;
}

inline JfnkReport jfnk_solve(const DpgSystem& sys, Vec U, const JfnkParams& p = {})
{
    sys.apply_boundary(U);
    JfnkReport rep;
    Vec G = sys.normal_residual(U);
    const double g0 = G.norm();
    rep.residual_norms.push_back(g0);
    const double tol = std::max(p.rtol * g0, p.atol);
    for (int it = 0; it < p.max_newton; ++it) {
        if (G.norm() < tol) {
            rep.converged = true;
            break;
        }
        const BlockJacobiPreconditioner P = sys.preconditioner(&U);
        const BoundaryData& bc = sys.boundary();
        LinearOperator Aop = [&](const Vec& v, Vec& y) {
            Vec vf = v;
            sys.zero_constrained(vf);
            y = jfnk_directional(sys, U, G, vf);
            for (int d : bc.dofs)
                y[d] = v[d];
        };
        LinearOperator Pop = [&P](const Vec& x, Vec& y) { P.apply(x, y); };
        const Vec rhs = -G;
        const KrylovResult kr = gmres(Aop, rhs, Pop, p.krylov);
        rep.krylov_iterations += kr.iterations;
        Vec delta = kr.x;
        sys.zero_constrained(delta);
        U += delta;
        G = sys.normal_residual(U);
        ++rep.iterations;
        rep.residual_norms.push_back(G.norm());
        if (!U.allFinite() || !std::isfinite(G.norm()) || G.norm() > 1e6 * std::max(g0, 1.0)) {
            rep.status = "diverged";
            rep.U = U;
            return rep;
        }
    }
    if (!rep.converged && G.norm() < tol)
        rep.converged = true;
    rep.status = rep.converged ? "converged" : "not converged";
    rep.U = U;
    return rep;
}

} // namespace dpg

#endif // DPGGS_NONLINEAR_HPP
