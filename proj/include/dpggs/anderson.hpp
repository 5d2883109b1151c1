#ifndef DPGGS_ANDERSON_HPP
#define DPGGS_ANDERSON_HPP

#include "common.hpp"
#include "line_search.hpp"

#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace dpg
{

struct AndersonParams
{
    int m = 5;
    double rtol = 1e-8;
    double atol = 1e-10;
    double stol = 1e-12;
    int max_iters = 100;
    double lambda0 = 1.0;
    bool line_search = true;
    LineSearchParams ls;
};

enum class StopReason
{
    converged,
    stagnation,
    max_iters,
    failure
};

inline const char* to_string(StopReason r)
{
    switch (r) {
    case StopReason::converged:
        return "converged";
    case StopReason::stagnation:
        return "stagnation";
    case StopReason::max_iters:
        return "max_iters";
    case StopReason::failure:
        return "failure";
    }
    return "unknown";
}

struct AndersonResult
{
    Vec x;
    int iterations = 0;
    bool converged = false;
    StopReason reason = StopReason::max_iters;
    std::vector<double> residual_norms; // |R_k|, k = 0, 1, ...
    std::vector<double> lambdas;
    std::vector<int> depths;            // m_k used at each step
    int map_evaluations = 0;
};

using FixedPointMap = std::function<Vec(const Vec&)>;

namespace detail
{

// Solves min |sum_i alpha_i R_i| with sum alpha_i = 1 through the difference
// form: gamma = argmin |R_k - dR gamma|, dR_j = R_{j+1} - R_j. Oldest columns
// are dropped while the QR factor is numerically rank deficient. Returns
// alpha for the kept history (oldest first); `first` is the first kept index.
inline Vec anderson_coefficients(const std::deque<Vec>& R, std::size_t& first)
{
    const std::size_t n = R.size();
    first = 0;
    while (n - first > 1) {
        const int cols = int(n - first - 1);
        Mat F(R.back().size(), cols);
        for (int j = 0; j < cols; ++j)
            F.col(j) = R[first + j + 1] - R[first + j];
        Eigen::HouseholderQR<Mat> qr(F);
        const Mat Rf = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        const Vec diag = Rf.diagonal().cwiseAbs();
        const double scale = F.colwise().norm().maxCoeff();
        if (scale > 0.0 && diag.minCoeff() > 1e-12 * scale) {
            const Vec qtb = (qr.householderQ().transpose() * R.back()).head(cols);
            const Vec gamma = Rf.topLeftCorner(cols, cols).triangularView<Eigen::Upper>().solve(qtb);
            // R_k - sum_j gamma_j (R_{j+1} - R_j) expanded in the R_j
            Vec alpha = Vec::Zero(cols + 1);
            alpha[cols] = 1.0;
            for (int j = 0; j < cols; ++j) {
                alpha[j + 1] -= gamma[j];
                alpha[j] += gamma[j];
            }
            return alpha;
        }
        ++first;
    }
    return Vec::Ones(1);
}

} // namespace detail

/// Anderson-accelerated fixed-point iteration for U = A(U) with a relaxation
/// lambda_k chosen by cubic backtracking on |U - A(U)|^2. With m = 0 and the
/// line search off it is the plain relaxed Picard iteration.
inline AndersonResult anderson_solve(const FixedPointMap& A, const Vec& x0, const AndersonParams& p)
{
    if (p.m < 0)
        throw Error("anderson_solve: depth m must be >= 0");
    AndersonResult res;
    std::deque<Vec> X, AX, R;
    auto eval = [&](const Vec& x) {
        ++res.map_evaluations;
        return A(x);
    };

    Vec a0 = eval(x0);
    Vec r0 = x0 - a0;
    const double r0n = r0.norm();
    res.residual_norms.push_back(r0n);
    const double tol = std::max(p.rtol * r0n, p.atol);
    if (r0n < tol) {
        res.x = x0;
        res.converged = true;
        res.reason = StopReason::converged;
        return res;
    }
    Vec x1 = (1.0 - p.lambda0) * x0 + p.lambda0 * a0;
    Vec a1 = eval(x1);
    X.push_back(x0);
    AX.push_back(a0);
    R.push_back(r0);
    X.push_back(x1);
    AX.push_back(a1);
    R.push_back(x1 - a1);
    res.lambdas.push_back(p.lambda0);
    res.depths.push_back(0);
    res.residual_norms.push_back(R.back().norm());
    int k = 1;

    while (true) {
        const double rk = R.back().norm();
        if (rk < tol) {
            res.converged = true;
            res.reason = StopReason::converged;
            break;
        }
        const Vec& xprev = X[X.size() - 2];
        if ((X.back() - xprev).norm() < p.stol * xprev.norm()) {
            res.reason = StopReason::stagnation;
            break;
        }
        if (k >= p.max_iters) {
            res.reason = StopReason::max_iters;
            break;
        }
        const int mk = std::min(k, p.m);
        while (int(R.size()) > mk + 1) {
            X.pop_front();
            AX.pop_front();
            R.pop_front();
        }
        std::size_t first = 0;
        const Vec alpha = detail::anderson_coefficients(R, first);
        Vec xbar = Vec::Zero(x0.size()), abar = Vec::Zero(x0.size());
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            xbar += alpha[i] * X[first + i];
            abar += alpha[i] * AX[first + i];
        }
        res.depths.push_back(int(alpha.size()) - 1);

        double lambda = p.lambda0;
        Vec xnew, anew;
        if (p.line_search) {
            double f0;
            if (alpha.size() == 1) {
                f0 = R.back().squaredNorm();
            } else {
                const Vec rbar = xbar - eval(xbar);
                f0 = rbar.squaredNorm();
            }
            auto merit = [&](double lam) {
                xnew = (1.0 - lam) * xbar + lam * abar;
                anew = eval(xnew);
                return (xnew - anew).squaredNorm();
            };
            const LineSearchResult ls = cubic_line_search(merit, f0, p.lambda0, p.ls);
            lambda = ls.lambda;
        } else {
            xnew = (1.0 - lambda) * xbar + lambda * abar;
            anew = eval(xnew);
        }
        if (!xnew.allFinite() || !anew.allFinite()) {
            res.reason = StopReason::failure;
            break;
        }
        res.lambdas.push_back(lambda);
        X.push_back(xnew);
        AX.push_back(anew);
        R.push_back(xnew - anew);
        res.residual_norms.push_back(R.back().norm());
        ++k;
    }
    res.x = X.back();
    res.iterations = k;
    return res;
}

} // namespace dpg

#endif // DPGGS_ANDERSON_HPP
