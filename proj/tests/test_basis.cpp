#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace dpg;

namespace
{

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

} // namespace

TEST(TriangleRule, DegreeZeroWeightsSumToReferenceArea)
{
    const QuadratureRule q = triangle_rule(0);
    double s = 0.0;
    for (double w : q.weights)
        s += w;
    EXPECT_NEAR(s, 0.5, 1e-15);
}

TEST(TriangleRule, IntegratesMonomialsExactly)
{
    for (int deg = 0; deg <= max_quadrature_degree; ++deg) {
        const QuadratureRule q = triangle_rule(deg);
        for (int a = 0; a <= deg; ++a) {
            for (int b = 0; a + b <= deg; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < q.size(); ++i)
                    s += q.weights[i] * std::pow(q.points[i].x(), a) * std::pow(q.points[i].y(), b);
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                EXPECT_NEAR(s, exact, 1e-14 * std::max(1.0, exact)) << "degree " << deg << " x^" << a << " y^" << b;
            }
        }
    }
}

TEST(TriangleRule, WeightsPositiveAndPointsInside)
{
    for (int deg = 0; deg <= max_quadrature_degree; ++deg) {
        const QuadratureRule q = triangle_rule(deg);
        for (std::size_t i = 0; i < q.size(); ++i) {
            EXPECT_GT(q.weights[i], 0.0);
            EXPECT_GE(q.points[i].x(), 0.0);
            EXPECT_GE(q.points[i].y(), 0.0);
            EXPECT_LE(q.points[i].x() + q.points[i].y(), 1.0 + 1e-15);
        }
    }
}

TEST(TriangleRule, RejectsOutOfRangeDegree)
{
    EXPECT_THROW(triangle_rule(-1), Error);
    EXPECT_THROW(triangle_rule(31), Error);
}

TEST(EdgeRule, MidpointRuleIntegratesLinears)
{
    const QuadratureRule q = edge_rule(1);
    ASSERT_EQ(q.size(), 1u);
    EXPECT_NEAR(q.weights[0] * (3.0 * q.points[0].x() + 2.0), 3.5, 1e-15);
}

TEST(EdgeRule, IntegratesMonomialsAndWeightsSumToOne)
{
    for (int deg = 0; deg <= 40; ++deg) {
        const QuadratureRule q = edge_rule(deg);
        double total = 0.0;
        for (double w : q.weights) {
            EXPECT_GT(w, 0.0);
            total += w;
        }
        EXPECT_NEAR(total, 1.0, 1e-14);
        for (int a = 0; a <= deg; ++a) {
            double s = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i)
                s += q.weights[i] * std::pow(q.points[i].x(), a);
            EXPECT_NEAR(s, 1.0 / (a + 1), 1e-14) << "degree " << deg << " x^" << a;
        }
    }
}

TEST(EdgeRule, RejectsNegativeDegree) { EXPECT_THROW(edge_rule(-1), Error); }

TEST(ModalBasis, OrthonormalOnReferenceTriangle)
{
    for (int k = 0; k <= 7; ++k) {
        const ModalTriangleBasis b(k);
        ASSERT_EQ(b.size(), dim_p(k));
        const QuadratureRule q = triangle_rule(2 * k);
        Mat M = Mat::Zero(b.size(), b.size());
        Vec v(b.size());
        Mat g(b.size(), 2);
        for (std::size_t i = 0; i < q.size(); ++i) {
            b.eval(q.points[i], v, g);
            M += q.weights[i] * v * v.transpose();
        }
        EXPECT_LT((M - Mat::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 1e-12) << "k = " << k;
    }
}

TEST(ModalBasis, GradientsMatchCentralDifferences)
{
    const double h = 1e-6;
    for (int k = 1; k <= 6; ++k) {
        const ModalTriangleBasis b(k);
        const int n = b.size();
        Vec v(n), vp(n), vm(n);
        Mat g(n, 2), dummy(n, 2);
        for (const Point xi : {Point(0.2, 0.3), Point(0.6, 0.1), Point(0.1, 0.75), Point(0.33, 0.33)}) {
            b.eval(xi, v, g);
            for (int d = 0; d < 2; ++d) {
                Point e = Point::Zero();
                e[d] = h;
                b.eval(xi + e, vp, dummy);
                b.eval(xi - e, vm, dummy);
                const Vec fd = (vp - vm) / (2.0 * h);
                EXPECT_LT((fd - g.col(d)).norm(), 1e-6 * std::max(1.0, g.col(d).norm())) << "k=" << k;
            }
        }
    }
}

TEST(NodalEdgeBasis, KroneckerAtNodes)
{
    EXPECT_THROW(NodalEdgeBasis(0), Error);
    for (int k = 1; k <= 6; ++k) {
        const NodalEdgeBasis b(k);
        for (int i = 0; i < b.size(); ++i) {
            const Vec v = b.values(b.nodes()[i]);
            for (int j = 0; j < b.size(); ++j)
                EXPECT_NEAR(v[j], i == j ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(NodalEdgeBasis, QuadraticIdentityTable)
{
    const NodalEdgeBasis b(2);
    Mat T(3, 3);
    for (int i = 0; i < 3; ++i)
        T.row(i) = b.values(b.nodes()[i]).transpose();
    EXPECT_LT((T - Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(NodalEdgeBasis, PartitionOfUnityAndDerivatives)
{
    for (int k = 1; k <= 5; ++k) {
        const NodalEdgeBasis b(k);
        Vec v(b.size()), d(b.size()), vp(b.size()), vm(b.size()), dd(b.size());
        for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
            b.eval(t, v, d);
            EXPECT_NEAR(v.sum(), 1.0, 1e-13);
            EXPECT_NEAR(d.sum(), 0.0, 1e-10);
            const double h = 1e-6;
            b.eval(t + h, vp, dd);
            b.eval(t - h, vm, dd);
            EXPECT_LT(((vp - vm) / (2 * h) - d).norm(), 1e-6 * std::max(1.0, d.norm()));
        }
    }
}

TEST(GllNodes, EndpointsAndSymmetry)
{
    for (int n = 2; n <= 8; ++n) {
        const auto x = gll_nodes(n);
        ASSERT_EQ(int(x.size()), n);
        EXPECT_EQ(x.front(), 0.0);
        EXPECT_EQ(x.back(), 1.0);
        for (int i = 0; i < n; ++i)
            EXPECT_NEAR(x[i] + x[n - 1 - i], 1.0, 1e-14);
        for (int i = 1; i < n; ++i)
            EXPECT_GT(x[i], x[i - 1]);
    }
    EXPECT_THROW(gll_nodes(1), Error);
}
