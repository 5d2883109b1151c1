#ifndef DPGGS_SPACES_HPP
#define DPGGS_SPACES_HPP

#include "mesh.hpp"
#include "shapes.hpp"

#include <functional>
#include <vector>

namespace dpg
{

/// Degrees of freedom of the trial space U_h^k: discontinuous q (two
/// components) and psi of degree k, a single-valued normal flux trace of
/// degree k per edge, and a continuous trace of degree k+1 on the skeleton.
/// Global ordering is blockwise (q, psi, qn, psihat).
///
/// Element-local ordering: q_r (m), q_z (m), psi (m), qn by local edge
/// (3 (k+1)), psihat vertex values (3) then interior edge nodes (3 k), with
/// m = dim P^k. Edge nodes follow the global edge direction v[0] -> v[1].
class TrialSpace
{
public:
    TrialSpace() = default;

    TrialSpace(const Mesh& mesh, int k) : k_(k)
    {
        if (k < 1)
            throw Error("trial space order must be >= 1, got " + std::to_string(k));
        nt_ = mesh.num_triangles();
        ne_ = mesh.num_edges();
        nv_ = mesh.num_vertices();
        m_ = dim_p(k);
        offsets_[0] = 0;
        offsets_[1] = 2 * m_ * nt_;
        offsets_[2] = offsets_[1] + m_ * nt_;
        offsets_[3] = offsets_[2] + (k + 1) * ne_;
        offsets_[4] = offsets_[3] + nv_ + k * ne_;
        build_local_maps(mesh);
    }

    int order() const { return k_; }
    int size() const { return offsets_[4]; }
    int block_offset(int b) const { return offsets_[b]; }
    int block_size(int b) const { return offsets_[b + 1] - offsets_[b]; }
    int interior_dim() const { return m_; }
    int num_elements() const { return nt_; }

    int num_q() const { return block_size(0); }
    int num_psi() const { return block_size(1); }
    int num_qn() const { return block_size(2); }
    int num_psihat() const { return block_size(3); }

    int q_dof(int t, int comp, int i) const { return offsets_[0] + (2 * t + comp) * m_ + i; }
    int psi_dof(int t, int i) const { return offsets_[1] + t * m_ + i; }
    int qn_dof(int e, int j) const { return offsets_[2] + e * (k_ + 1) + j; }
    int psihat_vertex_dof(int v) const { return offsets_[3] + v; }
    int psihat_interior_dof(int e, int j) const { return offsets_[3] + nv_ + e * k_ + j; }

    /// psihat DOF of node `node` (0..k+1) along edge `e`.
    int psihat_node_dof(const Mesh& mesh, int e, int node) const
    {
        if (node == 0)
            return psihat_vertex_dof(mesh.edge(e).v[0]);
        if (node == k_ + 1)
            return psihat_vertex_dof(mesh.edge(e).v[1]);
        return psihat_interior_dof(e, node - 1);
    }

    int local_size() const { return 3 * m_ + 3 * (k_ + 1) + 3 + 3 * k_; }
    int local_q(int comp) const { return comp * m_; }
    int local_psi() const { return 2 * m_; }
    int local_qn(int edge) const { return 3 * m_ + edge * (k_ + 1); }
    int local_psihat_vertex(int v) const { return 3 * m_ + 3 * (k_ + 1) + v; }
    int local_psihat_interior(int edge) const { return 3 * m_ + 3 * (k_ + 1) + 3 + edge * k_; }

    /// Local column of psihat node `node` (global edge direction) on local edge i.
    int local_psihat_node(const Mesh& mesh, int t, int i, int node) const
    {
        const int sign = mesh.tri_signs(t)[i];
        if (node == 0)
            return local_psihat_vertex(sign > 0 ? (i + 1) % 3 : (i + 2) % 3);
        if (node == k_ + 1)
            return local_psihat_vertex(sign > 0 ? (i + 2) % 3 : (i + 1) % 3);
        return local_psihat_interior(i) + node - 1;
    }

    /// Global indices of the element's local DOFs.
    const int* local_dofs(int t) const { return local_map_.data() + std::size_t(t) * local_size(); }

    Vec gather(const Vec& U, int t) const
    {
        const int n = local_size();
        const int* map = local_dofs(t);
        Vec u(n);
        for (int a = 0; a < n; ++a)
            u[a] = U[map[a]];
        return u;
    }

private:
    void build_local_maps(const Mesh& mesh)
    {
        const int n = local_size();
        local_map_.resize(std::size_t(nt_) * n);
        for (int t = 0; t < nt_; ++t) {
            int* map = local_map_.data() + std::size_t(t) * n;
            for (int c = 0; c < 2; ++c)
                for (int i = 0; i < m_; ++i)
                    map[local_q(c) + i] = q_dof(t, c, i);
            for (int i = 0; i < m_; ++i)
                map[local_psi() + i] = psi_dof(t, i);
            for (int i = 0; i < 3; ++i) {
                const int e = mesh.tri_edges(t)[i];
                for (int j = 0; j <= k_; ++j)
                    map[local_qn(i) + j] = qn_dof(e, j);
                map[local_psihat_vertex(i)] = psihat_vertex_dof(mesh.triangle(t)[i]);
                for (int j = 0; j < k_; ++j)
                    map[local_psihat_interior(i) + j] = psihat_interior_dof(e, j);
            }
        }
    }

    int k_ = 0;
    int nt_ = 0, ne_ = 0, nv_ = 0, m_ = 0;
    std::array<int, 5> offsets_{};
    std::vector<int> local_map_;
};

inline TrialSpace build_trial_space(const Mesh& mesh, int k) { return TrialSpace(mesh, k); }

/// Broken test space V_h^{k,s}: vector phi and scalar tau of degree k+s on
/// each element. Element-local ordering phi_r, phi_z, tau.
class TestSpace
{
public:
    TestSpace() = default;

    TestSpace(const Mesh& mesh, int k, int s) : k_(k), s_(s), nt_(mesh.num_triangles())
    {
        if (s < 2)
            throw Error("test space enrichment must satisfy s >= 2, got " + std::to_string(s));
        if (k < 1)
            throw Error("test space base order must be >= 1");
    }

    int order() const { return k_ + s_; }
    int enrichment() const { return s_; }
    int scalar_dim() const { return dim_p(k_ + s_); }
    int local_size() const { return 3 * scalar_dim(); }
    int local_phi(int comp) const { return comp * scalar_dim(); }
    int local_tau() const { return 2 * scalar_dim(); }
    int size() const { return nt_ * local_size(); }
    int offset(int t) const { return t * local_size(); }

private:
    int k_ = 0, s_ = 0, nt_ = 0;
};

inline TestSpace build_test_space(const Mesh& mesh, int k, int s) { return TestSpace(mesh, k, s); }

/// Strongly imposed Dirichlet values on the boundary psihat DOFs.
struct BoundaryData
{
    std::vector<int> dofs;
    std::vector<double> values;
    std::vector<char> constrained; // per trial DOF

    void apply(Vec& U) const
    {
        for (std::size_t i = 0; i < dofs.size(); ++i)
            U[dofs[i]] = values[i];
    }
};

/// Nodal interpolation of psi_D at the GLL nodes of every boundary edge.
inline BoundaryData interpolate_boundary(const Mesh& mesh, const TrialSpace& space,
                                         const std::function<double(double, double)>& psi_d)
{
    BoundaryData bd;
    bd.constrained.assign(space.size(), 0);
    const auto nodes = gll_nodes(space.order() + 2);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Edge& ed = mesh.edge(e);
        if (!ed.boundary())
            continue;
        const Point a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
        for (int j = 0; j < int(nodes.size()); ++j) {
            const int dof = space.psihat_node_dof(mesh, e, j);
            if (bd.constrained[dof])
                continue;
            const Point x = (1.0 - nodes[j]) * a + nodes[j] * b;
            bd.constrained[dof] = 1;
            bd.dofs.push_back(dof);
            bd.values.push_back(psi_d(x.x(), x.y()));
        }
    }
    return bd;
}

} // namespace dpg

#endif // DPGGS_SPACES_HPP
