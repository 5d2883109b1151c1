#include "dpggs/dpggs.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{

enum ExitCode
{
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_mesh = 3,
    exit_solver = 4
};

std::filesystem::path output_path(const dpg::RunConfig& c, const std::string& name)
{
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

dpg::Mesh initial_mesh(const dpg::RunConfig& c, const dpg::ProblemSpec& p)
{
    if (!c.mesh_file.empty())
        return dpg::read_msh_file(c.mesh_file);
    if (c.mesh_resolution)
        return dpg::build_builtin_mesh(p.boundary, (*c.mesh_resolution)[0], (*c.mesh_resolution)[1]);
    return dpg::default_mesh(p);
}

void write_solution(const dpg::RunConfig& c, const dpg::DpgSystem& sys, const dpg::Vec& U)
{
    const dpg::EnergyResidual E = sys.energy_residual(U);
    const auto path = output_path(c, "solution.vtk");
    dpg::write_vtk_file(path.string(), sys.mesh(), dpg::vertex_average(sys.mesh(), sys.trial(), U), E.per_element);
    std::printf("E_total      %.6e\nwrote        %s\n", E.total, path.string().c_str());
}

void print_errors(const dpg::DpgSystem& sys, const dpg::Vec& U)
{
    if (!sys.problem().exact)
        return;
    const dpg::LinfErrors e = dpg::linf_error(sys.mesh(), sys.trial(), U, *sys.problem().exact, sys.enrichment());
    std::printf("Linf(psi)    %.6e\nLinf(q)      %.6e\n", e.psi, e.q);
}

int run_amr(const dpg::RunConfig& c)
{
    const dpg::ProblemSpec p = dpg::problem_by_name(c.problem);
    if (c.solver != dpg::NonlinearSolverKind::anderson)
        throw dpg::ConfigError("the AMR loop uses the Anderson solver; set solver = anderson");
    const dpg::AmrResult res = dpg::amr_loop(p, initial_mesh(c, p), c.disc, c.anderson, c.linear, c.marking);
    std::printf("%5s %10s %14s %9s %6s\n", "iter", "elements", "E_total", "marked", "nl_it");
    for (const auto& r : res.report.rows)
        std::printf("%5d %10d %14.6e %9d %6d\n", r.iter, r.n_elements, r.E_total, r.n_marked, r.nonlinear_iters);
    std::printf("termination  %s\n", res.report.termination.c_str());
    const auto csv = output_path(c, "amr_history.csv");
    std::ofstream os(csv);
    dpg::write_amr_csv(os, res.report.rows);
    if (!os)
        throw dpg::Error("error while writing " + csv.string());
    std::printf("wrote        %s\n", csv.string().c_str());
    write_solution(c, *res.system, res.U);
    print_errors(*res.system, res.U);
    return res.report.termination.rfind("nonlinear solver failure", 0) == 0 ? exit_solver : exit_ok;
}

int run_solve(const dpg::RunConfig& c)
{
    if (c.amr)
        return run_amr(c);
    const dpg::ProblemSpec p = dpg::problem_by_name(c.problem);
    const dpg::DpgSystem sys(initial_mesh(c, p), p, c.disc.k, c.disc.s, c.disc.norm);
    std::printf("problem      %s\nelements     %d\nunknowns     %d\n", p.name.c_str(), sys.mesh().num_triangles(),
                sys.size());
    const auto t0 = std::chrono::steady_clock::now();
    dpg::Vec U;
    bool converged = false;
    if (c.solver == dpg::NonlinearSolverKind::anderson) {
        const dpg::NonlinearReport rep = dpg::solve_nonlinear(sys, sys.initial_guess(), c.anderson, c.linear);
        U = rep.U;
        converged = rep.converged;
        std::printf("solver       anderson (m = %d)\nstatus       %s\niterations   %d\nkrylov_its   %d\n",
                    c.anderson.m, dpg::to_string(rep.reason), rep.iterations, rep.krylov_iterations);
        std::printf("|J'G^-1 r|   %.6e (initial %.6e)\n", rep.normal_residual, rep.normal_residual0);
    } else {
        const dpg::JfnkReport rep = dpg::jfnk_solve(sys, sys.initial_guess(), c.jfnk);
        U = rep.U;
        converged = rep.converged;
        std::printf("solver       jfnk\nstatus       %s\niterations   %d\nkrylov_its   %d\n", rep.status.c_str(),
                    rep.iterations, rep.krylov_iterations);
    }
    std::printf("time         %.3f s\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    print_errors(sys, U);
    write_solution(c, sys, U);
    return converged ? exit_ok : exit_solver;
}

int run_converge(const dpg::RunConfig& c)
{
    const dpg::ProblemSpec p = dpg::problem_by_name(c.problem);
    if (c.solver != dpg::NonlinearSolverKind::anderson)
        throw dpg::ConfigError("the convergence study uses the Anderson solver; set solver = anderson");
    const auto rows = dpg::run_convergence_study(p, initial_mesh(c, p), c.disc, c.anderson, c.linear, c.levels);
    std::printf("%5s %12s %9s %13s %7s %13s %7s %6s\n", "level", "h", "elements", "err_psi", "order", "err_q",
                "order", "nl_it");
    bool ok = true;
    for (const auto& r : rows) {
        std::printf("%5d %12.4e %9d %13.5e %7.3f %13.5e %7.3f %6d %s\n", r.level, r.h, r.n_elements, r.err_psi,
                    r.order_psi, r.err_q, r.order_q, r.nonlinear_iters, r.note.c_str());
        ok = ok && r.solved;
    }
    const auto csv = output_path(c, "convergence.csv");
    std::ofstream os(csv);
    dpg::write_convergence_csv(os, rows);
    if (!os)
        throw dpg::Error("error while writing " + csv.string());
    std::printf("wrote        %s\n", csv.string().c_str());
    return ok && int(rows.size()) == c.levels ? exit_ok : exit_solver;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"DPG solver for the fixed-boundary Grad-Shafranov equation"};
    app.require_subcommand(1);
    std::string config;
    auto* solve = app.add_subcommand("solve", "solve once (or run AMR when amr = true)");
    auto* converge = app.add_subcommand("converge", "uniform refinement study against the exact solution");
    auto* amr = app.add_subcommand("amr", "adaptive refinement driven by the energy residual");
    for (auto* sub : {solve, converge, amr})
        sub->add_option("config", config, "key = value configuration file")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }
    try {
        const dpg::RunConfig c = dpg::parse_config_file(config);
        if (solve->parsed())
            return run_solve(c);
        if (converge->parsed())
            return run_converge(c);
        return run_amr(c);
    } catch (const dpg::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    } catch (const dpg::MeshError& e) {
        std::fprintf(stderr, "mesh error: %s\n", e.what());
        return exit_mesh;
    } catch (const dpg::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return exit_solver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_internal;
    }
}
