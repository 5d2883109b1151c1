#ifndef DPGGS_KRYLOV_HPP
#define DPGGS_KRYLOV_HPP

#include "common.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/SparseLU>

namespace dpg
{

using LinearOperator = std::function<void(const Vec& x, Vec& y)>;

struct KrylovParams
{
    int restart = 100;
    double rtol = 1e-10;
    int max_iters = 2000;
};

struct KrylovResult
{
    Vec x;
    int iterations = 0;
    double residual = 0.0; // final relative residual
    bool converged = false;
};

/// Right-preconditioned flexible GMRES(restart). The preconditioner may vary
/// between iterations. An empty `precond` means the identity.
inline KrylovResult gmres(const LinearOperator& A, const Vec& b, const LinearOperator& precond,
                          const KrylovParams& params, const Vec* x0 = nullptr)
{
    const Eigen::Index n = b.size();
    KrylovResult res;
    res.x = x0 ? *x0 : Vec::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x.setZero();
        res.converged = true;
        return res;
    }
    const int mr = std::max(1, params.restart);
    Vec r(n), w(n), tmp(n);
    A(res.x, tmp);
    r = b - tmp;
    double beta = r.norm();
    res.residual = beta / bnorm;
    if (res.residual <= params.rtol) {
        res.converged = true;
        return res;
    }
    std::vector<Vec> V, Z;
    Mat H(mr + 1, mr);
    Vec g(mr + 1), cs(mr), sn(mr);
    while (res.iterations < params.max_iters) {
        V.assign(1, r / beta);
        Z.clear();
        H.setZero();
        g.setZero();
        g[0] = beta;
        int j = 0;
        for (; j < mr && res.iterations < params.max_iters; ++j) {
            Vec z(n);
            if (precond)
                precond(V[j], z);
            else
                z = V[j];
            A(z, w);
            Z.push_back(std::move(z));
            // modified Gram-Schmidt
            for (int i = 0; i <= j; ++i) {
                H(i, j) = V[i].dot(w);
                w -= H(i, j) * V[i];
            }
            H(j + 1, j) = w.norm();
            for (int i = 0; i < j; ++i) {
                const double h = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
                H(i, j) = h;
            }
            const double d = std::hypot(H(j, j), H(j + 1, j));
            cs[j] = d == 0.0 ? 1.0 : H(j, j) / d;
            sn[j] = d == 0.0 ? 0.0 : H(j + 1, j) / d;
            const double hj1 = H(j + 1, j);
            H(j, j) = cs[j] * H(j, j) + sn[j] * hj1;
            H(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            ++res.iterations;
            res.residual = std::abs(g[j + 1]) / bnorm;
            const bool breakdown = hj1 <= 1e-14 * d;
            if (res.residual <= params.rtol || breakdown) {
                ++j;
                break;
            }
            V.push_back(w / hj1);
        }
        // solve the triangular system and update x
        const Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        for (int i = 0; i < j; ++i)
            res.x += y[i] * Z[i];
        A(res.x, tmp);
        r = b - tmp;
        beta = r.norm();
        res.residual = beta / bnorm;
        if (res.residual <= params.rtol * 1.0000001) {
            res.converged = true;
            return res;
        }
        if (beta == 0.0)
            break;
    }
    res.converged = res.residual <= params.rtol;
    return res;
}

/// Sparse LU of a general square matrix.
class DirectSolver
{
public:
    DirectSolver() = default;
    explicit DirectSolver(const SpMat& A) { factor(A); }

    void factor(const SpMat& A)
    {
        Acol_ = A;
        Acol_.makeCompressed();
        lu_.compute(Acol_);
        if (lu_.info() != Eigen::Success)
            throw SolverError("sparse LU factorization failed: " + lu_.lastErrorMessage());
        ready_ = true;
    }

    Vec solve(const Vec& b) const
    {
        if (!ready_)
            throw SolverError("DirectSolver used before factorization");
        Vec x = lu_.solve(b);
        if (!x.allFinite())
            throw SolverError("sparse LU solve produced non-finite values");
        return x;
    }

    bool ready() const { return ready_; }

private:
    using ColMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    ColMat Acol_;
    Eigen::SparseLU<ColMat, Eigen::COLAMDOrdering<int>> lu_;
    bool ready_ = false;
};

} // namespace dpg

#endif // DPGGS_KRYLOV_HPP
