#ifndef DPGGS_VTK_HPP
#define DPGGS_VTK_HPP

#include "assembly.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace dpg
{

/// Vertex values of psi_h, q_r, q_z averaged over the incident elements.
struct VertexFields
{
    Vec psi, qr, qz;
};

inline VertexFields vertex_average(const Mesh& mesh, const TrialSpace& space, const Vec& U)
{
    const int nv = mesh.num_vertices();
    VertexFields f{Vec::Zero(nv), Vec::Zero(nv), Vec::Zero(nv)};
    Vec count = Vec::Zero(nv);
    const std::vector<Point> corners{Point(0, 0), Point(1, 0), Point(0, 1)};
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const ElementFieldValues e = evaluate_element_fields(mesh, space, U, t, corners);
        for (int i = 0; i < 3; ++i) {
            const int v = mesh.triangle(t)[i];
            f.psi[v] += e.psi[i];
            f.qr[v] += e.qr[i];
            f.qz[v] += e.qz[i];
            count[v] += 1.0;
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (count[v] > 0) {
            f.psi[v] /= count[v];
            f.qr[v] /= count[v];
            f.qz[v] /= count[v];
        }
    }
    return f;
}

namespace detail
{

inline std::string vtk_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Legacy ASCII VTK unstructured grid with point fields psi, q_r, q_z and
/// cell field E_K (omitted when empty).
inline void write_vtk(std::ostream& os, const Mesh& mesh, const VertexFields& f, const Vec& E_K)
{
    using detail::vtk_real;
    const int nv = mesh.num_vertices(), nt = mesh.num_triangles();
    os << "# vtk DataFile Version 3.0\n";
    os << "Grad-Shafranov DPG solution\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nv << " double\n";
    for (int v = 0; v < nv; ++v)
        os << vtk_real(mesh.vertex(v).x()) << ' ' << vtk_real(mesh.vertex(v).y()) << " 0\n";
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (int t = 0; t < nt; ++t) {
        const auto& tv = mesh.triangle(t);
        os << "3 " << tv[0] << ' ' << tv[1] << ' ' << tv[2] << '\n';
    }
    os << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t)
        os << "5\n";
    os << "POINT_DATA " << nv << '\n';
    const std::pair<const char*, const Vec*> fields[] = {{"psi", &f.psi}, {"q_r", &f.qr}, {"q_z", &f.qz}};
    for (const auto& [name, vec] : fields) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v)
            os << vtk_real((*vec)[v]) << '\n';
    }
    if (E_K.size() == nt) {
        os << "CELL_DATA " << nt << '\n';
        os << "SCALARS E_K double 1\nLOOKUP_TABLE default\n";
        for (int t = 0; t < nt; ++t)
            os << vtk_real(E_K[t]) << '\n';
    }
}

inline void write_vtk_file(const std::string& path, const Mesh& mesh, const VertexFields& f, const Vec& E_K)
{
    std::ofstream os(path);
    if (!os)
        throw Error("cannot open " + path + " for writing");
    write_vtk(os, mesh, f, E_K);
    if (!os)
        throw Error("error while writing " + path);
}

} // namespace dpg

#endif // DPGGS_VTK_HPP
