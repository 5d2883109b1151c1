#ifndef DPGGS_STUDY_HPP
#define DPGGS_STUDY_HPP

#include "amr.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace dpg
{

struct ConvergenceRow
{
    int level = 0;
    double h = 0.0;
    int n_elements = 0;
    double err_psi = 0.0;
    double order_psi = std::numeric_limits<double>::quiet_NaN();
    double err_q = 0.0;
    double order_q = std::numeric_limits<double>::quiet_NaN();
    int nonlinear_iters = 0;
    bool solved = true;
    std::string note;
};

/// log2 of the error ratio; NaN when either error is at round-off level or
/// not positive.
inline double observed_order(double coarse, double fine, double floor = 1e-13)
{
    if (!(coarse > floor) || !(fine > floor))
        return std::numeric_limits<double>::quiet_NaN();
    return std::log2(coarse / fine);
}

/// Solves on the initial mesh and `levels - 1` uniform refinements of it.
/// Every level starts from the boundary-lifted zero guess so the relative
/// stopping test means the same thing on all levels. Solver failures are
/// recorded in the row and end the study.
inline std::vector<ConvergenceRow> run_convergence_study(const ProblemSpec& problem, const Mesh& initial,
                                                         const DiscretizationParams& disc, const AndersonParams& ap,
                                                         const LinearSolverParams& lp, int levels)
{
    if (!problem.exact)
        throw ConfigError("convergence study needs a problem with an exact solution");
    std::vector<ConvergenceRow> rows;
    auto sys = std::make_unique<DpgSystem>(initial, problem, disc.k, disc.s, disc.norm);
    for (int l = 0; l < levels; ++l) {
        ConvergenceRow row;
        row.level = l;
        row.h = sys->mesh().max_diameter();
        row.n_elements = sys->mesh().num_triangles();
        NonlinearReport rep;
        try {
            rep = solve_nonlinear(*sys, sys->initial_guess(), ap, lp);
        } catch (const Error& e) {
            row.solved = false;
            row.note = e.what();
            rows.push_back(row);
            break;
        }
        row.nonlinear_iters = rep.iterations;
        row.solved = rep.converged;
        if (!rep.converged)
            row.note = to_string(rep.reason);
        const LinfErrors e = linf_error(sys->mesh(), sys->trial(), rep.U, *problem.exact, disc.s);
        row.err_psi = e.psi;
        row.err_q = e.q;
        if (!rows.empty()) {
            row.order_psi = observed_order(rows.back().err_psi, e.psi);
            row.order_q = observed_order(rows.back().err_q, e.q);
        }
        rows.push_back(row);
        if (!rep.converged || l + 1 == levels)
            break;
        sys = std::make_unique<DpgSystem>(uniform_refine(sys->mesh()), problem, disc.k, disc.s, disc.norm);
    }
    return rows;
}

inline std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << "level,h,n_elements,err_psi,order_psi,err_q,order_q\n";
    for (const auto& r : rows) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        os << r.level << ',' << format_real(r.h) << ',' << r.n_elements << ','
           << format_real(r.solved ? r.err_psi : nan) << ',' << format_real(r.order_psi) << ','
           << format_real(r.solved ? r.err_q : nan) << ',' << format_real(r.order_q) << '\n';
    }
}

inline void write_amr_csv(std::ostream& os, const std::vector<AmrRow>& rows)
{
    os << "iter,n_elements,E_total,n_marked,nonlinear_iters\n";
    for (const auto& r : rows)
        os << r.iter << ',' << r.n_elements << ',' << format_real(r.E_total) << ',' << r.n_marked << ','
           << r.nonlinear_iters << '\n';
}

} // namespace dpg

#endif // DPGGS_STUDY_HPP
