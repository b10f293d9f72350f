#include "helpers.hpp"

#include "varicurv/geometry.hpp"
#include "varicurv/mesh_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace varicurv;
using namespace varicurv::testing;

namespace {

// Unit normal grad F / |grad F| of a level set, differentiated by central
// differences along the tangent plane. This is the curvature oracle: it shares
// nothing with the closed-form shape operators in the library.
template <class G>
Vec implicit_normal(const G& grad, const Vec& x)
{
    return grad(x).normalized();
}

template <class G>
Mat implicit_curvature(const G& f, const Vec& x, double sign)
{
    const int d = static_cast<int>(x.size());
    const double h = 1e-5;
    const Vec nu = sign * implicit_normal(f, x);
    const Mat p = Mat::Identity(d, d) - nu * nu.transpose();
    Mat dn(d, d); // dn(j, a) = D_j nu_a
    for (int j = 0; j < d; ++j) {
        Vec e = Vec::Zero(d);
        e(j) = h;
        dn.row(j) = (sign * (implicit_normal(f, x + e) - implicit_normal(f, x - e)) / (2.0 * h)).transpose();
    }
    return p * dn;
}

// Gradients of |x|^2 - 4, (rho - 2)^2 + x3^2 - 1/4 and x3 - (0.7 x1^2 - 0.4 x2^2) / 2.
Vec sphere_level(const Vec& x)
{
    return 2.0 * x;
}

Vec torus_level(const Vec& x)
{
    const double rho = std::hypot(x(0), x(1));
    const double s = 2.0 * (rho - 2.0) / rho;
    return v3(s * x(0), s * x(1), 2.0 * x(2));
}

Vec graph_level(const Vec& x)
{
    return v3(-0.7 * x(0), 0.4 * x(1), 1.0);
}

} // namespace

TEST(Geometry, SphereInnerNormalAtNorthPole)
{
    const auto s = Hypersurface::sphere(v3(0, 0, 0), 1.0, -1);
    EXPECT_TRUE(s.unit_normal(v3(0, 0, 1)).isApprox(v3(0, 0, -1), 1e-15));
}

TEST(Geometry, PlaneUpNormal)
{
    const auto p = Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), 1.0);
    EXPECT_TRUE(p.unit_normal(v3(0.3, -0.2, 0)).isApprox(v3(0, 0, 1), 1e-15));
}

TEST(Geometry, TorusOuterNormalOnEquator)
{
    const auto t = Hypersurface::torus(v3(0, 0, 0), 2.0, 0.5, 1);
    EXPECT_NEAR((t.unit_normal(v3(2.5, 0, 0)) - v3(1, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(Geometry, AnalyticNormalsAreUnit)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    const auto t = Hypersurface::torus(v3(0, 0, 0), 2.0, 0.5, 1);
    for (int k = 0; k < 200; ++k) {
        const double u = angle(rng);
        const double w = angle(rng);
        const double rho = 2.0 + 0.5 * std::cos(w);
        const Vec x = v3(rho * std::cos(u), rho * std::sin(u), 0.5 * std::sin(w));
        EXPECT_NEAR(t.unit_normal(x).norm(), 1.0, 1e-15);
        EXPECT_NEAR((t.unit_normal(x) - implicit_normal(torus_level, x)).norm(), 0.0, 1e-8);
    }
}

TEST(Geometry, SphereRadiusTwoShapeOperator)
{
    const auto s = Hypersurface::sphere(v3(0, 0, 0), 2.0, -1);
    const Mat p = v3(0, 1, 1).asDiagonal();
    const Mat w = s.geometric_curvature(v3(2, 0, 0), v3(-1, 0, 0));
    EXPECT_TRUE(w.isApprox(-0.5 * p, 1e-15));
    EXPECT_NEAR(w.trace(), -1.0, 1e-15);
    EXPECT_TRUE(s.geometric_curvature(v3(2, 0, 0), v3(1, 0, 0)).isApprox(0.5 * p, 1e-15));
}

TEST(Geometry, PlaneShapeOperatorVanishes)
{
    const auto p = Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), 1.0);
    EXPECT_EQ(p.geometric_curvature(v3(0.1, 0.2, 0), v3(0, 0, 1)).norm(), 0.0);
}

TEST(Geometry, ShapeOperatorsMatchImplicitDifferences)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> unit(-0.6, 0.6);
    const auto sphere = Hypersurface::sphere(v3(0, 0, 0), 2.0, -1);
    const auto torus = Hypersurface::torus(v3(0, 0, 0), 2.0, 0.5, 1);
    const auto graph = Hypersurface::graph(v3(0, 0, 0), 0.7, -0.4, 1.0, 1);
    for (int k = 0; k < 50; ++k) {
        const Vec xs = 2.0 * random_unit(rng, 3);
        const Vec ns = sphere.unit_normal(xs);
        EXPECT_NEAR((sphere.geometric_curvature(xs, ns) - implicit_curvature(sphere_level, xs, -1.0)).norm(), 0.0,
                    1e-8);

        const double u = angle(rng);
        const double w = angle(rng);
        const double rho = 2.0 + 0.5 * std::cos(w);
        const Vec xt = v3(rho * std::cos(u), rho * std::sin(u), 0.5 * std::sin(w));
        EXPECT_NEAR((torus.geometric_curvature(xt, torus.unit_normal(xt)) - implicit_curvature(torus_level, xt, 1.0))
                        .norm(),
                    0.0, 1e-8);

        const double a = unit(rng);
        const double b = unit(rng);
        const Vec xg = v3(a, b, 0.5 * (0.7 * a * a - 0.4 * b * b));
        EXPECT_NEAR((graph.geometric_curvature(xg, graph.unit_normal(xg)) - implicit_curvature(graph_level, xg, 1.0))
                        .norm(),
                    0.0, 1e-8);
    }
}

TEST(Geometry, FlippingOrientationNegatesNormalAndCurvature)
{
    const auto t = Hypersurface::torus(v3(0, 0, 0), 2.0, 0.5, 1);
    const auto f = t.flipped();
    const Vec x = v3(0, 1.5, 0);
    EXPECT_TRUE(f.unit_normal(x).isApprox(-t.unit_normal(x)));
    EXPECT_TRUE(f.geometric_curvature(x, f.unit_normal(x)).isApprox(-t.geometric_curvature(x, t.unit_normal(x))));
}

TEST(Geometry, CurvatureRejectsNonNormalDirections)
{
    const auto s = Hypersurface::sphere(v3(0, 0, 0), 1.0, 1);
    EXPECT_THROW(s.geometric_curvature(v3(1, 0, 0), v3(0, 1, 0)), NotNormalError);
    EXPECT_THROW(s.unit_normal(v3(1.5, 0, 0)), PointOffSurfaceError);
}

TEST(Geometry, SphereMassMatchesMidpointRuleClosedForm)
{
    const auto s = Hypersurface::sphere(v3(0, 0, 0), 1.0, -1);
    for (int n : {4, 16, 64}) {
        const double mass = s.sample_varifold(QuadratureRule{n, 1}).mass();
        EXPECT_NEAR(mass, midpoint_sphere_mass(1.0, n), 1e-11 * mass) << n;
    }
    EXPECT_NEAR(s.sample_varifold(QuadratureRule{64, 1}).mass() / (4.0 * kPi) - 1.0, 0.0, 5e-3);
}

TEST(Geometry, DoublePlaneMassIsTwiceArea)
{
    // Midpoint rule in the radius integrates r dr exactly.
    const auto p = Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), 1.5);
    const auto v = p.sample_varifold(QuadratureRule{8, 1}, 1, 1);
    EXPECT_NEAR(v.mass(), 2.0 * kPi * 1.5 * 1.5, 1e-12);
}

TEST(Geometry, TorusMassIsExactForPeriodicRule)
{
    const auto t = Hypersurface::torus(v3(0, 0, 0), 2.0, 0.5, 1);
    EXPECT_NEAR(t.sample_varifold(QuadratureRule{4, 1}).mass(), 4.0 * kPi * kPi * 2.0 * 0.5, 1e-12);
}

TEST(Geometry, LatitudeCircleLength)
{
    const auto c = Hypersurface::latitude_circle(kPi / 4.0);
    EXPECT_NEAR(c.sample_varifold(QuadratureRule{8, 1}).mass(), 2.0 * kPi * std::sin(kPi / 4.0), 1e-12);
}

TEST(Geometry, EmptyMeshSamplesNothing)
{
    Mesh m;
    m.ambient_dim = 3;
    const auto s = Hypersurface::from_mesh(m);
    const auto v = s.sample_varifold(QuadratureRule{4, 1});
    EXPECT_TRUE(v.empty());
    EXPECT_EQ(v.mass(), 0.0);
}

TEST(Geometry, SecondOrderRuleImprovesSphereMass)
{
    const auto s = Hypersurface::sphere(v3(0, 0, 0), 1.0, 1);
    const double e1 = std::abs(s.sample_varifold(QuadratureRule{8, 1}).mass() - 4.0 * kPi);
    const double e2 = std::abs(s.sample_varifold(QuadratureRule{8, 2}).mass() - 4.0 * kPi);
    EXPECT_LT(e2, 0.01 * e1);
}

TEST(Geometry, InvalidParametersThrow)
{
    EXPECT_THROW(Hypersurface::sphere(v3(0, 0, 0), -1.0), PreconditionError);
    EXPECT_THROW(Hypersurface::torus(v3(0, 0, 0), 1.0, 2.0), PreconditionError);
    EXPECT_THROW(Hypersurface::latitude_circle(0.0), PreconditionError);
    const auto s = Hypersurface::sphere(v3(0, 0, 0), 1.0);
    EXPECT_THROW(s.sample(QuadratureRule{0, 1}), PreconditionError);
    EXPECT_THROW(s.sample(QuadratureRule{4, 3}), PreconditionError);
}

TEST(Mesh, IcosphereIsConsistentAndApproximatesSphere)
{
    const auto s = Hypersurface::from_mesh(icosphere_mesh(1.0, 3), 1);
    EXPECT_FALSE(s.exact_curvature());
    const auto v = s.sample_varifold(QuadratureRule{1, 1});
    EXPECT_NEAR(v.mass() / (4.0 * kPi), 1.0, 0.02);
    double mean_trace = 0.0;
    for (const auto& a : v.atoms()) {
        EXPECT_GT(a.v.dot(a.x), 0.0); // outward
        mean_trace += a.mass * s.geometric_curvature(a.x, a.v).trace();
    }
    // Outward normal on the unit sphere: W = P, trace 2.
    EXPECT_NEAR(mean_trace / v.mass(), 2.0, 0.1);
}

TEST(Mesh, InconsistentOrientationIsRejected)
{
    Mesh m = icosphere_mesh(1.0, 1);
    std::swap(m.elements[3][0], m.elements[3][1]);
    EXPECT_THROW(Hypersurface::from_mesh(m), OrientationError);

    Mesh poly = polygon_mesh(1.0, 12);
    std::swap(poly.elements[5][0], poly.elements[5][1]);
    EXPECT_THROW(Hypersurface::from_mesh(poly), OrientationError);
}

TEST(Mesh, PolygonNormalsPointInward)
{
    const auto s = Hypersurface::from_mesh(polygon_mesh(2.0, 64), 1);
    const auto v = s.sample_varifold(QuadratureRule{1, 1});
    for (const auto& a : v.atoms()) {
        EXPECT_LT(a.v.dot(a.x), 0.0);
    }
}

TEST(OffFormat, ReadsTrianglesAndSegments)
{
    std::istringstream tri("OFF\n# tetra\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                           "3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n");
    const Mesh m = read_off(tri);
    EXPECT_EQ(m.ambient_dim, 3);
    EXPECT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(m.elements.size(), 4u);
    EXPECT_NO_THROW(Hypersurface::from_mesh(m));

    std::istringstream seg("OFF\n3 3 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n2 1 2\n2 2 0\n");
    const Mesh c = read_off(seg);
    EXPECT_EQ(c.ambient_dim, 2);
    EXPECT_EQ(c.vertices[1].size(), 2);
}

TEST(OffFormat, RoundTrips)
{
    const Mesh m = icosphere_mesh(1.0, 1);
    std::stringstream buffer;
    write_off(buffer, m);
    const Mesh back = read_off(buffer);
    ASSERT_EQ(back.vertices.size(), m.vertices.size());
    ASSERT_EQ(back.elements, m.elements);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        EXPECT_EQ(back.vertices[i], m.vertices[i]);
    }
}

TEST(OffFormat, ErrorsCarryLineNumbers)
{
    std::istringstream mixed("OFF\n3 2 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n2 0 1\n");
    try {
        read_off(mixed);
        FAIL() << "mixed faces accepted";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
    }
    std::istringstream lifted("OFF\n2 1 0\n0 0 0\n1 0 0.5\n2 0 1\n");
    EXPECT_THROW(read_off(lifted), ParseError);
    std::istringstream junk("OFF\n1 0 0\n0 zero 0\n");
    EXPECT_THROW(read_off(junk), ParseError);
}
