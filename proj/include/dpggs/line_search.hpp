#ifndef DPGGS_LINE_SEARCH_HPP
#define DPGGS_LINE_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <functional>

namespace dpg
{

struct LineSearchParams
{
    double alpha = 1e-4;      // sufficient decrease constant
    double lambda_min = 1e-4;
    double shrink_min = 0.1;  // lambda_new >= shrink_min * lambda_old
    double shrink_max = 0.5;  // lambda_new <= shrink_max * lambda_old
    int max_steps = 50;
};

struct LineSearchResult
{
    double lambda = 1.0;
    double merit = 0.0;
    int evaluations = 0;
    bool sufficient = false;
};

/// Backtracking with quadratic then cubic interpolation for a merit
/// f(lambda) = |R(x(lambda))|^2 whose slope at 0 is taken as -2 f(0).
/// Accepts the first lambda with f(lambda) <= f(0) (1 - 2 alpha lambda).
inline LineSearchResult cubic_line_search(const std::function<double(double)>& merit, double f0,
                                          double lambda_init = 1.0, const LineSearchParams& p = {})
{
    const double slope = -2.0 * f0;
    LineSearchResult res;
    double lambda = lambda_init;
    double prev_lambda = 0.0, prev_f = 0.0;
    for (int step = 0; step < p.max_steps; ++step) {
        const double f = merit(lambda);
        ++res.evaluations;
        res.lambda = lambda;
        res.merit = f;
        if (std::isfinite(f) && f <= f0 + p.alpha * lambda * slope) {
            res.sufficient = true;
            return res;
        }
        if (lambda <= p.lambda_min)
            return res;
        double next;
        if (!std::isfinite(f)) {
            next = p.shrink_max * lambda;
        } else if (step == 0) {
            // minimizer of the quadratic through f0, slope and f(lambda)
            next = -slope * lambda * lambda / (2.0 * (f - f0 - slope * lambda));
        } else {
            // minimizer of the cubic through f0, slope, f(lambda), f(prev_lambda)
            const double r1 = f - f0 - slope * lambda;
            const double r2 = prev_f - f0 - slope * prev_lambda;
            const double d = lambda - prev_lambda;
            const double a = (r1 / (lambda * lambda) - r2 / (prev_lambda * prev_lambda)) / d;
            const double b = (-prev_lambda * r1 / (lambda * lambda) + lambda * r2 / (prev_lambda * prev_lambda)) / d;
            if (a == 0.0) {
                next = -slope / (2.0 * b);
            } else {
                const double disc = b * b - 3.0 * a * slope;
                next = disc < 0.0 ? p.shrink_max * lambda : (-b + std::sqrt(disc)) / (3.0 * a);
            }
            if (!std::isfinite(next))
                next = p.shrink_max * lambda;
        }
        prev_lambda = lambda;
        prev_f = f;
        lambda = std::clamp(next, p.shrink_min * lambda, p.shrink_max * lambda);
        if (lambda < p.lambda_min)
            lambda = p.lambda_min;
    }
    return res;
}

} // namespace dpg

#endif // DPGGS_LINE_SEARCH_HPP
