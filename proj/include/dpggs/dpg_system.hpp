#ifndef DPGGS_DPG_SYSTEM_HPP
#define DPGGS_DPG_SYSTEM_HPP

#include "assembly.hpp"
#include "preconditioner.hpp"

#include <algorithm>
#include <vector>

namespace dpg
{

/// Which operator Jt G^-1 X the normal system uses.
enum class NormalMode
{
    linear,      // B^T G^-1 B (source derivative ignored)
    picard,      // J^T G^-1 B
    gauss_newton // J^T G^-1 J
};

struct EnergyResidual
{
    double total = 0.0;   // sqrt of the sum of squared element contributions
    Vec per_element;      // E_K
};

struct NormalSystem
{
    SpMat A;
    Vec b;
};

/// Global minimal-residual machinery on one mesh: cached element matrices,
/// residuals, normal operators and energy estimates.
class DpgSystem
{
public:
    DpgSystem(Mesh mesh, ProblemSpec problem, int k, int s = 2, TestNormKind norm = TestNormKind::standard)
        : mesh_(std::move(mesh)), problem_(std::move(problem)), trial_(mesh_, k), test_(mesh_, k, s),
          tab_(k, s), norm_(norm)
    {
        bc_ = interpolate_boundary(mesh_, trial_, problem_.psi_D);
        build_caches();
    }

    const Mesh& mesh() const { return mesh_; }
    const ProblemSpec& problem() const { return problem_; }
    const TrialSpace& trial() const { return trial_; }
    const TestSpace& test() const { return test_; }
    const ReferenceTables& tables() const { return tab_; }
    const BoundaryData& boundary() const { return bc_; }
    TestNormKind norm() const { return norm_; }
    int size() const { return trial_.size(); }
    int order() const { return trial_.order(); }
    int enrichment() const { return test_.enrichment(); }

    std::array<int, 5> block_offsets() const
    {
        return {trial_.block_offset(0), trial_.block_offset(1), trial_.block_offset(2), trial_.block_offset(3),
                trial_.size()};
    }

    const Mat& element_B(int t) const { return cache_[t].B; }
    const Eigen::LLT<Mat>& element_gram(int t) const { return cache_[t].G; }

    /// Zero field with the boundary values installed.
    Vec initial_guess() const
    {
        Vec U = Vec::Zero(size());
        bc_.apply(U);
        return U;
    }

    void apply_boundary(Vec& U) const { bc_.apply(U); }

    Vec local_psi(const Vec& U, int t) const
    {
        const int m = trial_.interior_dim();
        Vec c(m);
        for (int i = 0; i < m; ++i)
            c[i] = U[trial_.psi_dof(t, i)];
        return c;
    }

    ElementSource element_source(const Vec& U, int t) const
    {
        ElementSource src = assemble_element_source(mesh_, t, local_psi(U, t), problem_, tab_, false);
        src.L = cache_[t].L;
        return src;
    }

    /// Element residual r_K = B_K u_K - [0; N_K + L_K].
    Vec element_residual(const Vec& U, int t) const
    {
        const ElementSource src = element_source(U, t);
        Vec r = cache_[t].B * trial_.gather(U, t);
        r.segment(test_.local_tau(), test_.scalar_dim()) -= src.N + src.L;
        return r;
    }

    /// Element-concatenated test-space residual.
    Vec residual(const Vec& U) const
    {
        Vec r(test_.size());
        for (int t = 0; t < mesh_.num_triangles(); ++t)
            r.segment(test_.offset(t), test_.local_size()) = element_residual(U, t);
        return r;
    }

    /// Local Jacobian J_K = B_K - [0; D_K] (psi columns).
    Mat element_jacobian(const Vec& U, int t) const
    {
        Mat J = cache_[t].B;
        const ElementSource src = element_source(U, t);
        J.block(test_.local_tau(), trial_.local_psi(), test_.scalar_dim(), trial_.interior_dim()) -= src.D;
        return J;
    }

    /// d residual / d U as a sparse (test x trial) matrix.
    SpMat residual_jacobian(const Vec& U) const
    {
        std::vector<Eigen::Triplet<double>> trip;
        const int nl = trial_.local_size(), nt = test_.local_size();
        trip.reserve(std::size_t(mesh_.num_triangles()) * nl * nt);
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
            const Mat J = element_jacobian(U, t);
            const int* map = trial_.local_dofs(t);
            for (int i = 0; i < nt; ++i)
                for (int a = 0; a < nl; ++a)
                    if (J(i, a) != 0.0)
                        trip.emplace_back(test_.offset(t) + i, map[a], J(i, a));
        }
        SpMat Jg(test_.size(), size());
        Jg.setFromTriplets(trip.begin(), trip.end());
        return Jg;
    }

    /// Riesz representative G_K^-1 r_K of an element residual.
    Vec riesz_element(int t, const Vec& rK) const { return cache_[t].G.solve(rK); }

    EnergyResidual energy_residual(const Vec& U) const
    {
        EnergyResidual e;
        e.per_element.resize(mesh_.num_triangles());
        double sum = 0.0;
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
            const Vec r = element_residual(U, t);
            const Vec y = cache_[t].G.matrixL().solve(r);
            const double e2 = y.squaredNorm();
            e.per_element[t] = std::sqrt(e2);
            sum += e2;
        }
        e.total = std::sqrt(sum);
        return e;
    }

    /// J^T G^-1 r with constrained entries zeroed.
    Vec normal_residual(const Vec& U) const
    {
        Vec g = Vec::Zero(size());
        const int n = test_.scalar_dim(), m = trial_.interior_dim();
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
            const ElementSource src = element_source(U, t);
            Vec r = cache_[t].B * trial_.gather(U, t);
            r.segment(test_.local_tau(), n) -= src.N + src.L;
            const Vec y = cache_[t].G.solve(r);
            Vec gl = cache_[t].B.transpose() * y;
            gl.segment(trial_.local_psi(), m) -= src.D.transpose() * y.segment(test_.local_tau(), n);
            scatter_add(t, gl, g);
        }
        zero_constrained(g);
        return g;
    }

    /// Matrix-free y = sum_K J_K^T G_K^-1 X_K x_K (no constraints), with X = B
    /// for the linear and Picard modes and X = J for Gauss-Newton.
    Vec apply_normal(const Vec& U, const Vec& x, NormalMode mode) const
    {
        Vec y = Vec::Zero(size());
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
            Mat J = cache_[t].B;
            if (mode != NormalMode::linear)
                J = element_jacobian(U, t);
            const Mat& X = mode == NormalMode::gauss_newton ? J : cache_[t].B;
            const Vec z = cache_[t].G.solve(X * trial_.gather(x, t));
            scatter_add(t, J.transpose() * z, y);
        }
        return y;
    }

    /// Unconstrained B^T G^-1 B.
    const SpMat& linear_normal_matrix() const { return A0_; }

    /// Unconstrained normal matrix for the given mode.
    SpMat normal_matrix(const Vec& U, NormalMode mode) const
    {
        SpMat A = A0_;
        if (mode == NormalMode::linear || problem_.linear)
            return A;
        const int n = test_.scalar_dim(), m = trial_.interior_dim(), nl = trial_.local_size();
        const int p0 = trial_.local_psi();
        double* vals = A.valuePtr();
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
            const ElementSource src = element_source(U, t);
            const ElementCache& c = cache_[t];
            const int* slot = slots_.data() + std::size_t(t) * nl * nl;
            const Mat DW = src.D.transpose() * c.W_tau; // m x nl
            for (int i = 0; i < m; ++i)
                for (int b = 0; b < nl; ++b)
                    vals[slot[(p0 + i) * nl + b]] -= DW(i, b);
            if (mode == NormalMode::gauss_newton) {
                const Mat DGD = src.D.transpose() * c.Ginv_tt * src.D;
                for (int a = 0; a < nl; ++a)
                    for (int j = 0; j < m; ++j)
                        vals[slot[a * nl + p0 + j]] -= DW(j, a);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        vals[slot[(p0 + i) * nl + p0 + j]] += DGD(i, j);
                (void)n;
            }
        }
        return A;
    }

    /// Constrained fixed-point system J^T G^-1 B U = J^T G^-1 [0; N + L] with
    /// J evaluated at U. Boundary rows/columns are replaced by the identity.
    NormalSystem normal_system(const Vec& U, NormalMode mode = NormalMode::picard) const
    {
        if (mode == NormalMode::gauss_newton)
            throw Error("normal_system: Gauss-Newton mode has no fixed-point right-hand side");
        NormalSystem sys;
        sys.A = normal_matrix(U, mode);
        sys.b = Vec::Zero(size());
        const int n = test_.scalar_dim(), m = trial_.interior_dim();
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
            const ElementSource src = element_source(U, t);
            const ElementCache& c = cache_[t];
            const Vec s = src.N + src.L;
            Vec bl = c.W_tau.transpose() * s;
            if (mode == NormalMode::picard && !problem_.linear)
                bl.segment(trial_.local_psi(), m) -= src.D.transpose() * (c.Ginv_tt * s);
            scatter_add(t, bl, sys.b);
            (void)n;
        }
        Vec values = Vec::Zero(size());
        for (std::size_t i = 0; i < bc_.dofs.size(); ++i)
            values[bc_.dofs[i]] = bc_.values[i];
        apply_constraints(sys.A, sys.b, values);
        return sys;
    }

    /// Identity rows/columns on the boundary DOFs; `values` holds the
    /// prescribed entries (other entries ignored).
    void apply_constraints(SpMat& A, Vec& b, const Vec& values) const
    {
        double* vals = A.valuePtr();
        const int* inner = A.innerIndexPtr();
        const int* outer = A.outerIndexPtr();
        for (int row = 0; row < A.rows(); ++row) {
            const bool crow = bc_.constrained[row];
            for (int p = outer[row]; p < outer[row + 1]; ++p) {
                const int col = inner[p];
                if (crow) {
                    vals[p] = col == row ? 1.0 : 0.0;
                } else if (bc_.constrained[col]) {
                    b[row] -= vals[p] * values[col];
                    vals[p] = 0.0;
                }
            }
            if (crow)
                b[row] = values[row];
        }
    }

    /// Constrained B^T G^-1 B (linear part).
    SpMat constrained_linear_matrix() const
    {
        SpMat A = A0_;
        Vec b = Vec::Zero(size());
        apply_constraints(A, b, Vec::Zero(size()));
        return A;
    }

    /// Block Jacobi preconditioner from the constrained linear normal matrix,
    /// or from J^T G^-1 J at U when given.
    BlockJacobiPreconditioner preconditioner(const Vec* U = nullptr) const
    {
        if (!U)
            return BlockJacobiPreconditioner(constrained_linear_matrix(), block_offsets());
        SpMat A = normal_matrix(*U, NormalMode::gauss_newton);
        Vec b = Vec::Zero(size());
        apply_constraints(A, b, Vec::Zero(size()));
        return BlockJacobiPreconditioner(A, block_offsets());
    }

    void zero_constrained(Vec& v) const
    {
        for (int d : bc_.dofs)
            v[d] = 0.0;
    }

    void scatter_add(int t, const Vec& local, Vec& global) const
    {
        const int* map = trial_.local_dofs(t);
        for (int a = 0; a < local.size(); ++a)
            global[map[a]] += local[a];
    }

private:
    struct ElementCache
    {
        Mat B;
        Eigen::LLT<Mat> G;
        Mat W_tau;   // (G^-1 B) restricted to tau rows
        Mat Ginv_tt; // tau-tau block of G^-1
        Vec L;
    };

    void build_caches()
    {
        const int nt = mesh_.num_triangles();
        const int n = test_.scalar_dim(), nl = trial_.local_size(), T = test_.local_tau();
        cache_.resize(nt);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(std::size_t(nt) * nl * nl);
        for (int t = 0; t < nt; ++t) {
            ElementCache& c = cache_[t];
            c.B = assemble_element_B(mesh_, t, trial_, test_, tab_);
            c.G = factor_gram(assemble_element_gram(mesh_, t, test_, tab_, norm_), t);
            const Mat W = c.G.solve(c.B);
            c.W_tau = W.middleRows(T, n);
            Mat E = Mat::Zero(test_.local_size(), n);
            E.middleRows(T, n).setIdentity();
            c.Ginv_tt = c.G.solve(E).middleRows(T, n);
            c.L = assemble_element_source(mesh_, t, Vec::Zero(trial_.interior_dim()), problem_, tab_).L;
            const Mat A = c.B.transpose() * W;
            const int* map = trial_.local_dofs(t);
            for (int a = 0; a < nl; ++a)
                for (int b = 0; b < nl; ++b)
                    trip.emplace_back(map[a], map[b], A(a, b));
        }
        A0_.resize(size(), size());
        A0_.setFromTriplets(trip.begin(), trip.end());
        A0_.makeCompressed();
        trip.clear();
        trip.shrink_to_fit();

        slots_.resize(std::size_t(nt) * nl * nl);
        const int* inner = A0_.innerIndexPtr();
        const int* outer = A0_.outerIndexPtr();
        for (int t = 0; t < nt; ++t) {
            const int* map = trial_.local_dofs(t);
            int* slot = slots_.data() + std::size_t(t) * nl * nl;
            for (int a = 0; a < nl; ++a) {
                const int row = map[a];
                for (int b = 0; b < nl; ++b) {
                    const int* p = std::lower_bound(inner + outer[row], inner + outer[row + 1], map[b]);
                    slot[a * nl + b] = int(p - inner);
                }
            }
        }
    }

    Mesh mesh_;
    ProblemSpec problem_;
    TrialSpace trial_;
    TestSpace test_;
    ReferenceTables tab_;
    TestNormKind norm_;
    BoundaryData bc_;
    std::vector<ElementCache> cache_;
    SpMat A0_;
    std::vector<int> slots_;
};

} // namespace dpg

#endif // DPGGS_DPG_SYSTEM_HPP
