#ifndef DPGGS_PROBLEMS_HPP
#define DPGGS_PROBLEMS_HPP

#include "mesh.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

namespace dpg
{

using ScalarField = std::function<double(double r, double z)>;
using VectorField = std::function<Point(double r, double z)>;
using SourceField = std::function<double(double r, double z, double psi)>;

struct ExactSolution
{
    ScalarField psi;
    VectorField q; // -grad(psi) / r
};

/// A fixed-boundary Grad-Shafranov problem r div(grad(psi) / r) = -F(r, z, psi)
/// with F = F_N(r, z, psi) + F_L(r, z) and psi = psi_D on the boundary.
struct ProblemSpec
{
    std::string name;
    BoundaryCurve boundary;
    ScalarField F_L;
    SourceField F_N;
    SourceField dF_N; // d F_N / d psi
    ScalarField psi_D;
    std::optional<ExactSolution> exact;
    bool linear = false;              // F_N identically zero
    std::array<int, 2> resolution{};  // default built-in mesh resolution

    double F(double r, double z, double psi) const { return F_N(r, z, psi) + F_L(r, z); }
};

// ---------------------------------------------------------------------------
// Solov'ev equilibria

struct SolovevCoeffs
{
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    double eps = 0.0, kappa = 0.0, delta = 0.0;

    double psi(double r, double z) const
    {
        const double r2 = r * r;
        return r2 * r2 / 8.0 + d1 + d2 * r2 + d3 * (r2 * r2 - 4.0 * r2 * z * z);
    }

    Point q(double r, double z) const
    {
        return Point(-(r * r / 2.0 + 2.0 * d2 + d3 * (4.0 * r * r - 8.0 * z * z)), 8.0 * d3 * r * z);
    }
};

/// Coefficients making psi vanish at (1 + eps, 0), (1 - eps, 0) and
/// (1 - delta eps, kappa eps).
inline SolovevCoeffs solovev_coefficients(double eps, double kappa, double delta)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw Error("solovev_coefficients: eps must lie in (0, 1)");
    const std::array<Point, 3> pts{Point(1.0 + eps, 0.0), Point(1.0 - eps, 0.0),
                                   Point(1.0 - delta * eps, kappa * eps)};
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) {
        const double x2 = pts[i].x() * pts[i].x(), y2 = pts[i].y() * pts[i].y();
        A.row(i) << 1.0, x2, x2 * x2 - 4.0 * x2 * y2;
        b[i] = -x2 * x2 / 8.0;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible() || std::abs(A.determinant()) < 1e-14 * A.cwiseAbs().maxCoeff())
        throw Error("solovev_coefficients: singular shape system");
    const Eigen::Vector3d d = lu.solve(b);
    SolovevCoeffs c;
    c.d1 = d[0];
    c.d2 = d[1];
    c.d3 = d[2];
    c.eps = eps;
    c.kappa = kappa;
    c.delta = delta;
    return c;
}

/// Zero level set of psi, found along rays from `center` (psi < 0 inside).
inline BoundaryCurve level_set_curve(const ScalarField& psi, Point center, double max_radius, CurveKind kind)
{
    BoundaryCurve c;
    c.kind = kind;
    c.center = center;
    c.param = [=](double s) {
        const Point dir(std::cos(s), std::sin(s));
        const int steps = 2000;
        const double h = max_radius / steps;
        const double inside = psi(center.x(), center.y());
        double lo = 0.0, hi = -1.0;
        for (int i = 1; i <= steps; ++i) {
            const Point p = center + (i * h) * dir;
            if (std::signbit(psi(p.x(), p.y())) != std::signbit(inside)) {
                lo = (i - 1) * h;
                hi = i * h;
                break;
            }
        }
        if (hi < 0.0)
            throw MeshError("level_set_curve: no boundary crossing along ray");
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            const Point p = center + mid * dir;
            if (std::signbit(psi(p.x(), p.y())) == std::signbit(inside))
                lo = mid;
            else
                hi = mid;
        }
        return Point(center + (0.5 * (lo + hi)) * dir);
    };
    return c;
}

enum class SolovevKind
{
    iter,
    nstx
};

inline ProblemSpec solovev_problem(SolovevKind kind)
{
    const bool iter = kind == SolovevKind::iter;
    const SolovevCoeffs c = iter ? solovev_coefficients(0.32, 1.7, 0.33) : solovev_coefficients(0.78, 2.0, 0.35);
    ProblemSpec p;
    p.name = iter ? "solovev_iter" : "solovev_nstx";
    p.boundary = level_set_curve([c](double r, double z) { return c.psi(r, z); }, Point(1.0, 0.0),
                                 2.5 * c.eps * c.kappa, iter ? CurveKind::solovev_iter : CurveKind::solovev_nstx);
    p.F_L = [](double r, double) { return -r * r; };
    p.F_N = [](double, double, double) { return 0.0; };
    p.dF_N = [](double, double, double) { return 0.0; };
    p.psi_D = [c](double r, double z) { return c.psi(r, z); };
    p.exact = ExactSolution{[c](double r, double z) { return c.psi(r, z); },
                            [c](double r, double z) { return c.q(r, z); }};
    p.linear = true;
    p.resolution = {16, 3};
    return p;
}

// ---------------------------------------------------------------------------
// Manufactured nonlinear problem on the ITER-like Solov'ev domain

inline ProblemSpec manufactured_problem()
{
    constexpr double kr = 1.15 * std::numbers::pi, kz = 1.15, r0 = -0.5;
    auto exact = [](double r, double z) { return std::sin(kr * (r + r0)) * std::cos(kz * z); };
    ProblemSpec p = solovev_problem(SolovevKind::iter);
    p.name = "manufactured";
    p.F_N = [](double r, double, double psi) {
        return (kr * kr + kz * kz) * psi + r * (-psi * psi - std::exp(-psi));
    };
    p.dF_N = [](double r, double, double psi) {
        return (kr * kr + kz * kz) + r * (-2.0 * psi + std::exp(-psi));
    };
    p.F_L = [exact](double r, double z) {
        const double s = exact(r, z);
        return kr / r * std::cos(kr * (r + r0)) * std::cos(kz * z) + r * (s * s + std::exp(-s));
    };
    p.psi_D = exact;
    p.exact = ExactSolution{exact, [](double r, double z) {
                                const double dr = kr * std::cos(kr * (r + r0)) * std::cos(kz * z);
                                const double dz = -kz * std::sin(kr * (r + r0)) * std::sin(kz * z);
                                return Point(-dr / r, -dz / r);
                            }};
    p.linear = false;
    return p;
}

// ---------------------------------------------------------------------------
// D-shaped domain, homogeneous boundary data

inline ProblemSpec dshape_problem()
{
    ProblemSpec p;
    p.name = "dshape";
    p.boundary = d_shape_curve(0.32, 0.33, 1.7);
    p.F_L = [](double r, double) { return 0.5 * r * r; };
    p.F_N = [](double r, double, double psi) {
        const double a = 1.0 - psi * psi;
        return r * r * (0.5 - 0.5 * a * a);
    };
    p.dF_N = [](double r, double, double psi) { return 2.0 * r * r * psi * (1.0 - psi * psi); };
    p.psi_D = [](double, double) { return 0.0; };
    p.resolution = {16, 3};
    return p;
}

// ---------------------------------------------------------------------------
// Rectangle with a sharply localized nonlinear source

struct RectSourceParams
{
    double sigma2 = 0.005, c1 = 0.8, c2 = 0.2;
};

inline ProblemSpec rect_amr_problem()
{
    const RectSourceParams s;
    ProblemSpec p;
    p.name = "rect_amr";
    p.boundary = rectangle_curve(0.1, 1.6, -0.75, 0.75);
    p.F_L = [](double, double) { return 0.0; };
    p.F_N = [s](double r, double, double psi) {
        const double E = std::exp(-psi * psi / s.sigma2);
        return 2.0 * r * r * psi * (s.c2 * (1.0 - E) + (s.c1 + s.c2 * psi * psi) * E / s.sigma2);
    };
    p.dF_N = [s](double r, double, double psi) {
        const double p2 = psi * psi;
        const double E = std::exp(-p2 / s.sigma2);
        const double a = s.c1 + s.c2 * p2;
        const double g = s.c2 * (1.0 - E) + a * E / s.sigma2;
        return 2.0 * r * r * (g + p2 * E / s.sigma2 * (4.0 * s.c2 - 2.0 * a / s.sigma2));
    };
    p.psi_D = [](double, double) { return 0.25; };
    p.resolution = {4, 4};
    return p;
}

inline ProblemSpec problem_by_name(const std::string& name)
{
    if (name == "solovev_iter")
        return solovev_problem(SolovevKind::iter);
    if (name == "solovev_nstx")
        return solovev_problem(SolovevKind::nstx);
    if (name == "manufactured")
        return manufactured_problem();
    if (name == "dshape")
        return dshape_problem();
    if (name == "rect_amr")
        return rect_amr_problem();
    throw ConfigError("unknown problem '" + name +
                      "' (expected solovev_iter, solovev_nstx, manufactured, dshape or rect_amr)");
}

inline Mesh default_mesh(const ProblemSpec& p)
{
    return build_builtin_mesh(p.boundary, p.resolution[0], p.resolution[1]);
}

} // namespace dpg

#endif // DPGGS_PROBLEMS_HPP
