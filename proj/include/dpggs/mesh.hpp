#ifndef DPGGS_MESH_HPP
#define DPGGS_MESH_HPP

#include "common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dpg
{

/// Mesh edge. The vertex order puts tri[0] on the left of v[0] -> v[1], so
/// `normal` points from tri[0] (the smaller triangle index) into tri[1], and
/// outward on the boundary.
struct Edge
{
    std::array<int, 2> v{-1, -1};
    std::array<int, 2> tri{-1, -1};
    Point normal = Point::Zero();
    double length = 0.0;

    bool boundary() const { return tri[1] < 0; }
};

/// Edge table with per-triangle incidence. Local edge i of a triangle is the
/// one opposite its vertex i.
struct Skeleton
{
    std::vector<Edge> edges;
    std::vector<std::array<int, 3>> tri_edges;
    std::vector<std::array<int, 3>> tri_signs; // +1 if the triangle is edge.tri[0]
};

namespace detail
{

inline std::uint64_t edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

inline double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace detail

inline Skeleton extract_skeleton(const std::vector<Point>& vertices,
                                 const std::vector<std::array<int, 3>>& triangles)
{
    Skeleton sk;
    sk.tri_edges.resize(triangles.size());
    sk.tri_signs.resize(triangles.size());
    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(triangles.size() * 2);
    for (int t = 0; t < int(triangles.size()); ++t) {
        const auto& tv = triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int a = tv[(i + 1) % 3], b = tv[(i + 2) % 3];
            auto [it, inserted] = lookup.try_emplace(detail::edge_key(a, b), int(sk.edges.size()));
            if (inserted) {
                Edge e;
                e.v = {a, b};
                e.tri = {t, -1};
                const Point d = vertices[b] - vertices[a];
                e.length = d.norm();
                e.normal = Point(d.y(), -d.x()) / e.length;
                sk.edges.push_back(e);
                sk.tri_signs[t][i] = 1;
            } else {
                Edge& e = sk.edges[it->second];
                if (e.tri[1] >= 0)
                    throw MeshError("extract_skeleton: edge (" + std::to_string(a) + ", " +
                                    std::to_string(b) + ") is shared by more than two triangles");
                e.tri[1] = t;
                sk.tri_signs[t][i] = -1;
            }
            sk.tri_edges[t][i] = it->second;
        }
    }
    return sk;
}

/// Conforming triangulation of a region of the (r, z) half-plane. Immutable;
/// refinement returns a new mesh whose `parent` entries index this one.
class Mesh
{
public:
    Mesh() = default;

    /// Validates the input and builds the skeleton. `refinement_edge` defaults
    /// to the longest edge of each triangle.
    static Mesh from_triangles(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                               std::vector<int> refinement_edge = {}, std::vector<int> generation = {},
                               std::vector<int> parent = {})
    {
        Mesh m;
        m.vertices_ = std::move(vertices);
        m.triangles_ = std::move(triangles);
        const int nt = int(m.triangles_.size());
        if (nt == 0)
            throw MeshError("mesh has no triangles");
        for (std::size_t v = 0; v < m.vertices_.size(); ++v)
            if (!(m.vertices_[v].x() > 0.0))
                throw MeshError("vertex " + std::to_string(v) + " has r <= 0");
        for (int t = 0; t < nt; ++t) {
            for (int i = 0; i < 3; ++i)
                if (m.triangles_[t][i] < 0 || m.triangles_[t][i] >= int(m.vertices_.size()))
                    throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
            if (!(m.area(t) > 0.0))
                throw MeshError("triangle " + std::to_string(t) + " has non-positive signed area");
        }
        m.refinement_edge_ = refinement_edge.empty() ? m.longest_edges() : std::move(refinement_edge);
        m.generation_ = generation.empty() ? std::vector<int>(nt, 0) : std::move(generation);
        m.parent_ = parent.empty() ? std::vector<int>(nt, -1) : std::move(parent);
        m.skeleton_ = extract_skeleton(m.vertices_, m.triangles_);
        return m;
    }

    int num_vertices() const { return int(vertices_.size()); }
    int num_triangles() const { return int(triangles_.size()); }
    int num_edges() const { return int(skeleton_.edges.size()); }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<Edge>& edges() const { return skeleton_.edges; }
    const Skeleton& skeleton() const { return skeleton_; }
    const Point& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const Edge& edge(int e) const { return skeleton_.edges[e]; }
    const std::array<int, 3>& tri_edges(int t) const { return skeleton_.tri_edges[t]; }
    const std::array<int, 3>& tri_signs(int t) const { return skeleton_.tri_signs[t]; }
    int refinement_edge(int t) const { return refinement_edge_[t]; }
    int generation(int t) const { return generation_[t]; }
    int parent(int t) const { return parent_[t]; }
    const std::vector<int>& parents() const { return parent_; }

    double area(int t) const
    {
        const auto& tv = triangles_[t];
        return detail::signed_area(vertices_[tv[0]], vertices_[tv[1]], vertices_[tv[2]]);
    }

    double total_area() const
    {
        double a = 0.0;
        for (int t = 0; t < num_triangles(); ++t)
            a += area(t);
        return a;
    }

    double diameter(int t) const
    {
        const auto& tv = triangles_[t];
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            d = std::max(d, (vertices_[tv[(i + 1) % 3]] - vertices_[tv[(i + 2) % 3]]).norm());
        return d;
    }

    double max_diameter() const
    {
        double h = 0.0;
        for (int t = 0; t < num_triangles(); ++t)
            h = std::max(h, diameter(t));
        return h;
    }

    Point centroid(int t) const
    {
        const auto& tv = triangles_[t];
        return (vertices_[tv[0]] + vertices_[tv[1]] + vertices_[tv[2]]) / 3.0;
    }

    int num_boundary_edges() const
    {
        return int(std::count_if(edges().begin(), edges().end(), [](const Edge& e) { return e.boundary(); }));
    }

private:
    std::vector<int> longest_edges() const
    {
        std::vector<int> out(triangles_.size());
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const auto& tv = triangles_[t];
            int best = 0;
            double len = -1.0;
            for (int i = 0; i < 3; ++i) {
                const double l = (vertices_[tv[(i + 1) % 3]] - vertices_[tv[(i + 2) % 3]]).norm();
                // ties resolved toward the lower local index (relative tolerance)
                if (l > len * (1.0 + 1e-12)) {
                    len = l;
                    best = i;
                }
            }
            out[t] = best;
        }
        return out;
    }

    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<int> refinement_edge_;
    std::vector<int> generation_;
    std::vector<int> parent_;
    Skeleton skeleton_;
};

// ---------------------------------------------------------------------------
// Boundary curves and built-in meshes

enum class CurveKind
{
    rectangle,
    d_shape,
    solovev_iter,
    solovev_nstx,
    polygon
};

/// Closed curve s in [0, 2 pi] -> (r, z), counterclockwise.
struct BoundaryCurve
{
    CurveKind kind = CurveKind::polygon;
    std::function<Point(double)> param;
    Point center = Point(1.0, 0.0);   // star center used by the ring mesher
    std::array<double, 4> bounds{};   // (r0, r1, z0, z1) for rectangles

    Point operator()(double s) const { return param(s); }
};

inline BoundaryCurve rectangle_curve(double r0, double r1, double z0, double z1)
{
    BoundaryCurve c;
    c.kind = CurveKind::rectangle;
    c.bounds = {r0, r1, z0, z1};
    c.center = Point(0.5 * (r0 + r1), 0.5 * (z0 + z1));
    // perimeter walked at uniform speed
    c.param = [=](double s) {
        const double w = r1 - r0, h = z1 - z0, per = 2.0 * (w + h);
        double d = std::fmod(s / (2.0 * std::numbers::pi), 1.0) * per;
        if (d < 0)
            d += per;
        if (d <= w)
            return Point(r0 + d, z0);
        d -= w;
        if (d <= h)
            return Point(r1, z0 + d);
        d -= h;
        if (d <= w)
            return Point(r1 - d, z1);
        d -= w;
        return Point(r0, z1 - d);
    };
    return c;
}

/// D-shaped curve r = 1 + eps cos(s + asin(delta sin s)), z = eps kappa sin s.
inline BoundaryCurve d_shape_curve(double eps, double delta, double kappa)
{
    BoundaryCurve c;
    c.kind = CurveKind::d_shape;
    c.center = Point(1.0, 0.0);
    c.param = [=](double s) {
        return Point(1.0 + eps * std::cos(s + std::asin(delta * std::sin(s))), eps * kappa * std::sin(s));
    };
    return c;
}

/// Structured rectangle mesh with 2 nx ny triangles. Diagonals in the upper
/// half mirror those in the lower half, so the mesh is symmetric about the
/// horizontal midline when ny is even.
inline Mesh build_rectangle_mesh(double r0, double r1, double z0, double z1, int nx, int ny)
{
    if (nx <= 0 || ny <= 0)
        throw MeshError("build_rectangle_mesh: resolution must be positive");
    std::vector<Point> verts;
    verts.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            verts.emplace_back(r0 + (r1 - r0) * i / nx, z0 + (z1 - z0) * j / ny);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (2 * j < ny) {
                tris.push_back({a, b, c});
                tris.push_back({a, c, d});
            } else {
                tris.push_back({a, b, d});
                tris.push_back({b, c, d});
            }
        }
    }
    return Mesh::from_triangles(std::move(verts), std::move(tris));
}

/// Ring mesh of a domain star-shaped about `curve.center`: n_radial scaled
/// copies of n_angular boundary samples, triangulated ring to ring.
inline Mesh build_star_mesh(const BoundaryCurve& curve, int n_angular, int n_radial)
{
    if (n_angular < 3 || n_radial < 1)
        throw MeshError("build_star_mesh: need n_angular >= 3 and n_radial >= 1");
    const Point c = curve.center;
    std::vector<Point> verts{c};
    for (int j = 1; j <= n_radial; ++j) {
        const double scale = double(j) / n_radial;
        for (int i = 0; i < n_angular; ++i) {
            const Point p = curve(2.0 * std::numbers::pi * i / n_angular);
            verts.push_back(j == n_radial ? p : Point(c + scale * (p - c)));
        }
    }
    auto id = [n_angular](int j, int i) { return 1 + (j - 1) * n_angular + (i % n_angular); };
    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < n_angular; ++i)
        tris.push_back({0, id(1, i), id(1, i + 1)});
    for (int j = 1; j < n_radial; ++j) {
        for (int i = 0; i < n_angular; ++i) {
            const int a = id(j, i), b = id(j + 1, i), cc = id(j + 1, i + 1), d = id(j, i + 1);
            // diagonal choice mirrors across the s = pi line for z-symmetric curves
            if (2 * i < n_angular) {
                tris.push_back({a, b, cc});
                tris.push_back({a, cc, d});
            } else {
                tris.push_back({a, b, d});
                tris.push_back({b, cc, d});
            }
        }
    }
    return Mesh::from_triangles(std::move(verts), std::move(tris));
}

/// Rectangles get a structured grid with resolution (nx, ny); every other
/// curve gets the ring mesher with resolution (n_angular, n_radial).
inline Mesh build_builtin_mesh(const BoundaryCurve& curve, int n1, int n2)
{
    if (n1 <= 0 || n2 <= 0)
        throw MeshError("build_builtin_mesh: resolution must be positive");
    if (curve.kind == CurveKind::rectangle) {
        const auto& b = curve.bounds;
        return build_rectangle_mesh(b[0], b[1], b[2], b[3], n1, n2);
    }
    return build_star_mesh(curve, n1, n2);
}

// ---------------------------------------------------------------------------
// Refinement

/// Red refinement: every triangle split into four through its edge midpoints.
inline Mesh uniform_refine(const Mesh& mesh)
{
    std::vector<Point> verts = mesh.vertices();
    const int nv = mesh.num_vertices();
    for (const Edge& e : mesh.edges())
        verts.push_back(0.5 * (mesh.vertex(e.v[0]) + mesh.vertex(e.v[1])));
    std::vector<std::array<int, 3>> tris;
    std::vector<int> gen, parent;
    tris.reserve(4 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tv = mesh.triangle(t);
        const auto& te = mesh.tri_edges(t);
        const int ma = nv + te[0], mb = nv + te[1], mc = nv + te[2];
        tris.push_back({tv[0], mc, mb});
        tris.push_back({mc, tv[1], ma});
        tris.push_back({mb, ma, tv[2]});
        tris.push_back({ma, mb, mc});
        for (int c = 0; c < 4; ++c) {
            gen.push_back(mesh.generation(t) + 2);
            parent.push_back(t);
        }
    }
    return Mesh::from_triangles(std::move(verts), std::move(tris), {}, std::move(gen), std::move(parent));
}

/// Newest-vertex bisection of the marked triangles with conforming closure.
inline Mesh bisect_conforming(const Mesh& mesh, const std::vector<int>& marked, int max_closure_sweeps = 10000)
{
    const int ne = mesh.num_edges();
    const int nt = mesh.num_triangles();
    std::vector<char> edge_marked(ne, 0);
    for (int t : marked) {
        if (t < 0 || t >= nt)
            throw MeshError("bisect_conforming: marked index " + std::to_string(t) + " out of range");
        edge_marked[mesh.tri_edges(t)[mesh.refinement_edge(t)]] = 1;
    }
    // closure: any triangle with a marked edge must split its refinement edge
    bool changed = true;
    int sweeps = 0;
    while (changed) {
        if (++sweeps > max_closure_sweeps)
            throw MeshError("bisect_conforming: closure did not terminate");
        changed = false;
        for (int t = 0; t < nt; ++t) {
            const auto& te = mesh.tri_edges(t);
            const int ref = te[mesh.refinement_edge(t)];
            if (!edge_marked[ref] && (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]])) {
                edge_marked[ref] = 1;
                changed = true;
            }
        }
    }

    std::vector<Point> verts = mesh.vertices();
    std::vector<int> midpoint(ne, -1);
    for (int e = 0; e < ne; ++e) {
        if (edge_marked[e]) {
            midpoint[e] = int(verts.size());
            const Edge& ed = mesh.edge(e);
            verts.push_back(0.5 * (mesh.vertex(ed.v[0]) + mesh.vertex(ed.v[1])));
        }
    }
    std::unordered_map<std::uint64_t, int> edge_of;
    edge_of.reserve(2 * ne);
    for (int e = 0; e < ne; ++e)
        edge_of.emplace(detail::edge_key(mesh.edge(e).v[0], mesh.edge(e).v[1]), e);
    auto marked_mid = [&](int a, int b) {
        auto it = edge_of.find(detail::edge_key(a, b));
        return it == edge_of.end() ? -1 : midpoint[it->second];
    };

    std::vector<std::array<int, 3>> tris;
    std::vector<int> refedge, gen, parent;
    // triangle (apex, a, b) stored counterclockwise as {a, b, apex}, refinement edge a-b
    std::function<void(int, int, int, int, int)> split = [&](int a, int b, int apex, int g, int p) {
        const int m = marked_mid(a, b);
        if (m < 0) {
            tris.push_back({a, b, apex});
            refedge.push_back(2);
            gen.push_back(g);
            parent.push_back(p);
            return;
        }
        split(apex, a, m, g + 1, p);
        split(b, apex, m, g + 1, p);
    };
    for (int t = 0; t < nt; ++t) {
        const auto& tv = mesh.triangle(t);
        const int i = mesh.refinement_edge(t);
        split(tv[(i + 1) % 3], tv[(i + 2) % 3], tv[i], mesh.generation(t), t);
    }
    return Mesh::from_triangles(std::move(verts), std::move(tris), std::move(refedge), std::move(gen),
                                std::move(parent));
}

} // namespace dpg

#endif // DPGGS_MESH_HPP
