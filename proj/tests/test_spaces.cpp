#include "helpers.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace dpg;

TEST(TrialSpace, SingleTriangleCountsForLinears)
{
    const Mesh m = dpg::testing::single_triangle();
    const TrialSpace s(m, 1);
    EXPECT_EQ(s.num_q(), 6);
    EXPECT_EQ(s.num_psi(), 3);
    EXPECT_EQ(s.num_qn(), 6);
    EXPECT_EQ(s.num_psihat(), 6);
    EXPECT_EQ(s.size(), 21);
}

TEST(TrialSpace, TwoTriangleQuadraticFluxCount)
{
    const TrialSpace s(dpg::testing::two_triangle_square(), 2);
    EXPECT_EQ(s.num_qn(), 15);
}

TEST(TrialSpace, CountingFormulasAndBlockPartition)
{
    const Mesh m = default_mesh(dshape_problem());
    const int T = m.num_triangles(), E = m.num_edges(), V = m.num_vertices();
    for (int k = 1; k <= 4; ++k) {
        const TrialSpace s(m, k);
        EXPECT_EQ(s.num_q(), 2 * T * (k + 1) * (k + 2) / 2);
        EXPECT_EQ(s.num_psi(), T * (k + 1) * (k + 2) / 2);
        EXPECT_EQ(s.num_qn(), E * (k + 1));
        EXPECT_EQ(s.num_psihat(), V + E * k);
        EXPECT_EQ(s.block_offset(0), 0);
        for (int b = 0; b < 4; ++b)
            EXPECT_LE(s.block_offset(b), s.block_offset(b + 1));
        EXPECT_EQ(s.block_offset(4), s.size());
        EXPECT_EQ(s.size(), s.num_q() + s.num_psi() + s.num_qn() + s.num_psihat());
    }
    EXPECT_THROW(TrialSpace(m, 0), Error);
}

TEST(TrialSpace, LocalMapsReferenceEveryDof)
{
    const Mesh m = build_rectangle_mesh(0.1, 1.6, -0.75, 0.75, 3, 2);
    const int k = 2;
    const TrialSpace s(m, k);
    std::vector<int> refs(s.size(), 0);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const int* map = s.local_dofs(t);
        std::set<int> local(map, map + s.local_size());
        EXPECT_EQ(int(local.size()), s.local_size()) << "duplicate DOF in element " << t;
        for (int a = 0; a < s.local_size(); ++a)
            ++refs[map[a]];
    }
    for (int d = 0; d < s.size(); ++d) {
        EXPECT_GE(refs[d], 1) << "unreferenced DOF " << d;
        if (d < s.block_offset(2))
            EXPECT_EQ(refs[d], 1) << "discontinuous DOF shared: " << d;
    }
}

TEST(TrialSpace, InteriorFluxSignsOpposite)
{
    const Mesh m = build_rectangle_mesh(0.1, 1.6, -0.75, 0.75, 4, 4);
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edge(e);
        if (ed.boundary())
            continue;
        int prod = 1;
        for (int side = 0; side < 2; ++side) {
            const int t = ed.tri[side];
            for (int i = 0; i < 3; ++i)
                if (m.tri_edges(t)[i] == e)
                    prod *= m.tri_signs(t)[i];
        }
        EXPECT_EQ(prod, -1);
    }
}

TEST(TrialSpace, PsihatVertexSharedAcrossEdges)
{
    const Mesh m = build_rectangle_mesh(0.1, 1.6, -0.75, 0.75, 2, 2);
    const TrialSpace s(m, 3);
    for (int e = 0; e < m.num_edges(); ++e) {
        EXPECT_EQ(s.psihat_node_dof(m, e, 0), s.psihat_vertex_dof(m.edge(e).v[0]));
        EXPECT_EQ(s.psihat_node_dof(m, e, 4), s.psihat_vertex_dof(m.edge(e).v[1]));
    }
}

TEST(TestSpace, DimensionsAndEnrichmentGate)
{
    const Mesh m = dpg::testing::single_triangle();
    EXPECT_EQ(TestSpace(m, 1, 2).local_size(), 30);
    EXPECT_EQ(TestSpace(m, 2, 2).local_size(), 45);
    EXPECT_EQ(TestSpace(m, 3, 3).local_size(), 3 * dim_p(6));
    EXPECT_THROW(TestSpace(m, 1, 1), Error);
    EXPECT_THROW(build_test_space(m, 2, 0), Error);
}

TEST(BoundaryData, ConstantReproduced)
{
    const Mesh m = build_rectangle_mesh(0.1, 1.6, -0.75, 0.75, 4, 4);
    const int k = 2;
    const TrialSpace s(m, k);
    const BoundaryData bd = interpolate_boundary(m, s, [](double, double) { return 0.25; });
    // boundary vertices plus k interior nodes per boundary edge
    EXPECT_EQ(int(bd.dofs.size()), 16 + 16 * k);
    for (double v : bd.values)
        EXPECT_EQ(v, 0.25);
    std::set<int> dofs(bd.dofs.begin(), bd.dofs.end());
    EXPECT_EQ(dofs.size(), bd.dofs.size());
    for (int d : bd.dofs) {
        EXPECT_GE(d, s.block_offset(3));
        EXPECT_TRUE(bd.constrained[d]);
    }
    int constrained = 0;
    for (char c : bd.constrained)
        constrained += c;
    EXPECT_EQ(constrained, int(bd.dofs.size()));
}

TEST(BoundaryData, LinearDataInterpolatedExactlyAlongEdges)
{
    const Mesh m = build_builtin_mesh(d_shape_curve(0.32, 0.33, 1.7), 16, 3);
    const int k = 1;
    const TrialSpace s(m, k);
    auto psi_d = [](double r, double z) { return 0.3 * r - 1.7 * z + 0.2; };
    const BoundaryData bd = interpolate_boundary(m, s, psi_d);
    Vec U = Vec::Zero(s.size());
    bd.apply(U);
    const NodalEdgeBasis basis(k + 1);
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edge(e);
        if (!ed.boundary())
            continue;
        const Point a = m.vertex(ed.v[0]), b = m.vertex(ed.v[1]);
        for (int node = 0; node <= k + 1; ++node) {
            const Point x = (1.0 - basis.nodes()[node]) * a + basis.nodes()[node] * b;
            EXPECT_EQ(U[s.psihat_node_dof(m, e, node)], psi_d(x.x(), x.y()));
        }
        for (double t = 0.0; t <= 1.0; t += 0.05) {
            const Vec phi = basis.values(t);
            double v = 0.0;
            for (int node = 0; node <= k + 1; ++node)
                v += phi[node] * U[s.psihat_node_dof(m, e, node)];
            const Point x = (1.0 - t) * a + t * b;
            EXPECT_NEAR(v, psi_d(x.x(), x.y()), 1e-14);
        }
    }
}

TEST(BoundaryData, SolovevBoundaryNearlyZero)
{
    const ProblemSpec p = solovev_problem(SolovevKind::iter);
    const Mesh m = default_mesh(p);
    const TrialSpace s(m, 2);
    const BoundaryData bd = interpolate_boundary(m, s, p.psi_D);
    double vmax = 0.0, interior = 0.0;
    for (std::size_t i = 0; i < bd.dofs.size(); ++i) {
        if (bd.dofs[i] < s.block_offset(3) + m.num_vertices())
            vmax = std::max(vmax, std::abs(bd.values[i]));
        else
            interior = std::max(interior, std::abs(bd.values[i]));
    }
    // vertices lie on the zero level set; edge nodes sit on chords
    EXPECT_LT(vmax, 1e-12);
    EXPECT_LT(interior, 1e-2);
}
