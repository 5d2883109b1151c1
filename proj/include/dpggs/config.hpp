#ifndef DPGGS_CONFIG_HPP
#define DPGGS_CONFIG_HPP

#include "amr.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace dpg
{

enum class NonlinearSolverKind
{
    anderson,
    jfnk
};

struct RunConfig
{
    std::string problem;
    std::string mesh_file;                   // MSH 2.2 path, or empty
    std::optional<std::array<int, 2>> mesh_resolution; // built-in mesher
    DiscretizationParams disc;
    NonlinearSolverKind solver = NonlinearSolverKind::anderson;
    AndersonParams anderson;
    JfnkParams jfnk;
    LinearSolverParams linear;
    bool amr = false;
    MarkingParams marking;
    int levels = 4;
    std::string output_dir = ".";
};

namespace detail
{

inline std::string strip(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

class ConfigLine
{
public:
    ConfigLine(int line, std::string key, std::string value) : line_(line), key_(std::move(key)), value_(std::move(value)) {}

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError("config line " + std::to_string(line_) + ": " + msg);
    }

    double real() const
    {
        double v = 0.0;
        const char* b = value_.data();
        const char* e = b + value_.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || !std::isfinite(v))
            fail("cannot parse '" + value_ + "' as a number for key '" + key_ + "'");
        return v;
    }

    int integer() const
    {
        int v = 0;
        const char* b = value_.data();
        const char* e = b + value_.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e)
            fail("cannot parse '" + value_ + "' as an integer for key '" + key_ + "'");
        return v;
    }

    bool boolean() const
    {
        if (value_ == "true" || value_ == "1" || value_ == "on" || value_ == "yes")
            return true;
        if (value_ == "false" || value_ == "0" || value_ == "off" || value_ == "no")
            return false;
        fail("cannot parse '" + value_ + "' as a boolean for key '" + key_ + "'");
    }

    const std::string& text() const { return value_; }
    int line() const { return line_; }

private:
    int line_;
    std::string key_, value_;
};

} // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Unknown keys, bad values
/// and violated constraints raise ConfigError with the line number.
inline RunConfig parse_config(std::istream& in)
{
    RunConfig c;
    std::map<std::string, int> seen;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = detail::strip(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::strip(line.substr(0, eq));
        const detail::ConfigLine v(lineno, key, detail::strip(line.substr(eq + 1)));
        if (seen.count(key))
            v.fail("duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
        seen[key] = lineno;

        if (key == "problem") {
            c.problem = v.text();
        } else if (key == "mesh_file") {
            c.mesh_file = v.text();
        } else if (key == "mesh_resolution") {
            std::istringstream ss(v.text());
            std::string a, b;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b))
                v.fail("mesh_resolution expects two integers 'n1, n2'");
            c.mesh_resolution = std::array<int, 2>{detail::ConfigLine(lineno, key, detail::strip(a)).integer(),
                                                   detail::ConfigLine(lineno, key, detail::strip(b)).integer()};
            if ((*c.mesh_resolution)[0] <= 0 || (*c.mesh_resolution)[1] <= 0)
                v.fail("mesh_resolution entries must be positive");
        } else if (key == "k") {
            c.disc.k = v.integer();
            if (c.disc.k < 1)
                v.fail("k must satisfy k >= 1");
        } else if (key == "s") {
            c.disc.s = v.integer();
            if (c.disc.s < 2)
                v.fail("s must satisfy s >= 2");
        } else if (key == "test_norm") {
            if (v.text() == "standard")
                c.disc.norm = TestNormKind::standard;
            else if (v.text() == "adjoint_graph")
                c.disc.norm = TestNormKind::adjoint_graph;
            else
                v.fail("test_norm must be 'standard' or 'adjoint_graph'");
        } else if (key == "solver") {
            if (v.text() == "anderson")
                c.solver = NonlinearSolverKind::anderson;
            else if (v.text() == "jfnk")
                c.solver = NonlinearSolverKind::jfnk;
            else
                v.fail("solver must be 'anderson' or 'jfnk'");
        } else if (key == "m") {
            c.anderson.m = v.integer();
            if (c.anderson.m < 0)
                v.fail("m must be >= 0");
        } else if (key == "rtol" || key == "atol" || key == "stol") {
            const double x = v.real();
            if (!(x > 0.0))
                v.fail(key + " must be positive");
            (key == "rtol" ? c.anderson.rtol : key == "atol" ? c.anderson.atol : c.anderson.stol) = x;
            if (key == "rtol")
                c.jfnk.rtol = x;
            if (key == "atol")
                c.jfnk.atol = x;
        } else if (key == "max_iters") {
            c.anderson.max_iters = v.integer();
            c.jfnk.max_newton = c.anderson.max_iters;
            if (c.anderson.max_iters < 1)
                v.fail("max_iters must be >= 1");
        } else if (key == "lambda0") {
            c.anderson.lambda0 = v.real();
            if (!(c.anderson.lambda0 > 0.0 && c.anderson.lambda0 <= 1.0))
                v.fail("lambda0 must lie in (0, 1]");
        } else if (key == "line_search") {
            c.anderson.line_search = v.boolean();
        } else if (key == "linear_solver") {
            if (v.text() == "gmres")
                c.linear.kind = InnerSolverKind::gmres;
            else if (v.text() == "direct")
                c.linear.kind = InnerSolverKind::direct;
            else
                v.fail("linear_solver must be 'gmres' or 'direct'");
        } else if (key == "linear_rtol") {
            c.linear.krylov.rtol = v.real();
            if (!(c.linear.krylov.rtol > 0.0))
                v.fail("linear_rtol must be positive");
        } else if (key == "gmres_restart") {
            c.linear.krylov.restart = v.integer();
            if (c.linear.krylov.restart < 1)
                v.fail("gmres_restart must be >= 1");
        } else if (key == "gmres_max_iters") {
            c.linear.krylov.max_iters = v.integer();
            if (c.linear.krylov.max_iters < 1)
                v.fail("gmres_max_iters must be >= 1");
        } else if (key == "amr") {
            c.amr = v.boolean();
        } else if (key == "atol_amr") {
            c.marking.atol_amr = v.real();
            if (c.marking.atol_amr < 0.0)
                v.fail("atol_amr must be >= 0");
        } else if (key == "theta_max" || key == "theta_total") {
            const double x = v.real();
            if (!(x >= 0.0 && x < 1.0))
                v.fail(key + " must lie in [0, 1)");
            (key == "theta_max" ? c.marking.theta_max : c.marking.theta_total) = x;
        } else if (key == "max_elements") {
            c.marking.max_elements = v.integer();
            if (c.marking.max_elements < 1)
                v.fail("max_elements must be >= 1");
        } else if (key == "max_amr_iters") {
            c.marking.max_amr_iters = v.integer();
            if (c.marking.max_amr_iters < 0)
                v.fail("max_amr_iters must be >= 0");
        } else if (key == "levels") {
            c.levels = v.integer();
            if (c.levels < 1)
                v.fail("levels must be >= 1");
        } else if (key == "output_dir") {
            c.output_dir = v.text();
        } else {
            v.fail("unknown key '" + key + "'");
        }
    }
    if (c.problem.empty())
        throw ConfigError("config: required key 'problem' is missing");
    if (!c.mesh_file.empty() && c.mesh_resolution)
        throw ConfigError("config line " + std::to_string(seen["mesh_resolution"]) +
                          ": mesh_file and mesh_resolution are mutually exclusive");
    return c;
}

inline RunConfig parse_config(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

} // namespace dpg

#endif // DPGGS_CONFIG_HPP
