#ifndef DPGGS_MSH_READER_HPP
#define DPGGS_MSH_READER_HPP

#include "mesh.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace dpg
{

namespace detail
{

class MshLines
{
public:
    explicit MshLines(std::istream& in) : in_(in) {}

    bool next(std::string& line)
    {
        while (std::getline(in_, line)) {
            ++number_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                return true;
        }
        return false;
    }

    std::string expect(const char* what)
    {
        std::string line;
        if (!next(line))
            fail(std::string("unexpected end of file, expected ") + what);
        return line;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw MeshError("msh line " + std::to_string(number_) + ": " + msg);
    }

    int number() const { return number_; }

private:
    std::istream& in_;
    int number_ = 0;
};

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

} // namespace detail

/// Reads a Gmsh ASCII 2.2 mesh: 3-node triangles form the mesh, 2-node lines
/// must lie on its boundary, points are ignored. Coordinates are (r, z, ignored).
inline Mesh read_msh(std::istream& in)
{
    detail::MshLines lines(in);
    std::string line;
    bool have_format = false, have_nodes = false, have_elements = false;
    std::vector<Point> verts;
    std::unordered_map<long, int> node_index;
    std::vector<std::array<int, 3>> tris;
    std::vector<std::pair<std::array<int, 2>, int>> boundary_lines; // (nodes, line number)

    while (lines.next(line)) {
        const std::string head = detail::trim(line);
        if (head == "$MeshFormat") {
            std::istringstream ss(lines.expect("version line"));
            std::string version;
            int file_type = -1;
            if (!(ss >> version >> file_type))
                lines.fail("malformed $MeshFormat header");
            if (version != "2.2" && version != "2.2.0" && version != "2")
                lines.fail("unsupported MSH version " + version + " (only 2.2 is read)");
            if (file_type != 0)
                lines.fail("binary MSH files are not supported");
            if (detail::trim(lines.expect("$EndMeshFormat")) != "$EndMeshFormat")
                lines.fail("expected $EndMeshFormat");
            have_format = true;
        } else if (head == "$Nodes") {
            if (!have_format)
                lines.fail("$Nodes before $MeshFormat");
            long n = -1;
            if (!(std::istringstream(lines.expect("node count")) >> n) || n < 0)
                lines.fail("malformed node count");
            verts.reserve(n);
            for (long i = 0; i < n; ++i) {
                std::istringstream ss(lines.expect("node"));
                long id;
                double r, z, unused;
                if (!(ss >> id >> r >> z >> unused))
                    lines.fail("malformed node line");
                if (!(r > 0.0))
                    lines.fail("node " + std::to_string(id) + " has r <= 0");
                if (!node_index.emplace(id, int(verts.size())).second)
                    lines.fail("duplicate node id " + std::to_string(id));
                verts.emplace_back(r, z);
            }
            if (detail::trim(lines.expect("$EndNodes")) != "$EndNodes")
                lines.fail("expected $EndNodes");
            have_nodes = true;
        } else if (head == "$Elements") {
            if (!have_nodes)
                lines.fail("$Elements before $Nodes");
            long n = -1;
            if (!(std::istringstream(lines.expect("element count")) >> n) || n < 0)
                lines.fail("malformed element count");
            for (long i = 0; i < n; ++i) {
                std::istringstream ss(lines.expect("element"));
                long id;
                int type, ntags;
                if (!(ss >> id >> type >> ntags) || ntags < 0)
                    lines.fail("malformed element line");
                for (int t = 0; t < ntags; ++t) {
                    long tag;
                    if (!(ss >> tag))
                        lines.fail("missing element tag");
                }
                int nn = 0;
                if (type == 1)
                    nn = 2;
                else if (type == 2)
                    nn = 3;
                else if (type == 15)
                    nn = 1;
                else
                    lines.fail("unsupported element type " + std::to_string(type));
                std::array<int, 3> nodes{-1, -1, -1};
                for (int k = 0; k < nn; ++k) {
                    long nid;
                    if (!(ss >> nid))
                        lines.fail("missing element node");
                    auto it = node_index.find(nid);
                    if (it == node_index.end())
                        lines.fail("element " + std::to_string(id) + " references missing node " + std::to_string(nid));
                    nodes[k] = it->second;
                }
                if (type == 2) {
                    if (!(detail::signed_area(verts[nodes[0]], verts[nodes[1]], verts[nodes[2]]) > 0.0))
                        lines.fail("triangle " + std::to_string(id) + " has non-positive area");
                    tris.push_back(nodes);
                } else if (type == 1) {
                    boundary_lines.push_back({{nodes[0], nodes[1]}, lines.number()});
                }
            }
            if (detail::trim(lines.expect("$EndElements")) != "$EndElements")
                lines.fail("expected $EndElements");
            have_elements = true;
        } else if (!head.empty() && head[0] == '$') {
            // skip unknown sections
            const std::string end = "$End" + head.substr(1);
            while (detail::trim(lines.expect(end.c_str())) != end) {
            }
        } else {
            lines.fail("unexpected content '" + head + "'");
        }
    }
    if (!have_format)
        throw MeshError("msh: missing $MeshFormat section");
    if (!have_elements)
        throw MeshError("msh: missing $Elements section");

    // drop nodes no triangle uses (geometry points, construction nodes)
    std::vector<int> remap(verts.size(), -1);
    for (const auto& t : tris)
        for (int v : t)
            remap[v] = 0;
    std::vector<Point> used;
    for (std::size_t v = 0; v < verts.size(); ++v)
        if (remap[v] == 0) {
            remap[v] = int(used.size());
            used.push_back(verts[v]);
        }
    for (auto& t : tris)
        for (int& v : t)
            v = remap[v];
    for (auto& [nodes, lineno] : boundary_lines)
        for (int& v : nodes) {
            if (remap[v] < 0)
                throw MeshError("msh line " + std::to_string(lineno) + ": line element uses a node of no triangle");
            v = remap[v];
        }
    Mesh mesh = Mesh::from_triangles(std::move(used), std::move(tris));
    std::unordered_map<std::uint64_t, int> edge_of;
    for (int e = 0; e < mesh.num_edges(); ++e)
        edge_of.emplace(detail::edge_key(mesh.edge(e).v[0], mesh.edge(e).v[1]), e);
    for (const auto& [nodes, lineno] : boundary_lines) {
        auto it = edge_of.find(detail::edge_key(nodes[0], nodes[1]));
        if (it == edge_of.end() || !mesh.edge(it->second).boundary())
            throw MeshError("msh line " + std::to_string(lineno) + ": line element is not a boundary edge of the triangulation");
    }
    return mesh;
}

inline Mesh read_msh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("cannot open mesh file " + path);
    return read_msh(in);
}

} // namespace dpg

#endif // DPGGS_MSH_READER_HPP
