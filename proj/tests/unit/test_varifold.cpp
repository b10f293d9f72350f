#include "helpers.hpp"

#include "varicurv/geometry.hpp"
#include "varicurv/test_function.hpp"
#include "varicurv/varifold.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <sstream>

using namespace varicurv;
using namespace varicurv::testing;

namespace {

OrientedVarifold double_plane(double radius = 1.0, int resolution = 8)
{
    return Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), radius).sample_varifold(QuadratureRule{resolution, 1}, 1, 1);
}

OrientedVarifold random_atoms(std::mt19937_64& rng, int d, int count)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Atom> atoms;
    for (int k = 0; k < count; ++k) {
        Vec x(d);
        for (int a = 0; a < d; ++a) {
            x(a) = u(rng);
        }
        atoms.push_back(Atom{x, random_unit(rng, d), 0.5 * (u(rng) + 1.0)});
    }
    return OrientedVarifold(atoms, d, "random");
}

} // namespace

TEST(Varifold, ConstantOneIntegratesToMass)
{
    const auto v = Hypersurface::sphere(v3(0, 0, 0), 1.0).sample_varifold(QuadratureRule{32, 1});
    const auto r = integrate(v, [](const Vec&, const Vec&) { return 1.0; });
    EXPECT_TRUE(r.finite);
    EXPECT_NEAR(r.value, midpoint_sphere_mass(1.0, 32), 1e-11);
    EXPECT_EQ(integrate(v, [](const Vec&, const Vec&) { return 0.0; }).value, 0.0);
}

TEST(Varifold, OppositeSheetsCancelOddIntegrand)
{
    const auto v = double_plane();
    EXPECT_EQ(integrate(v, [](const Vec&, const Vec& n) { return n(2); }).value, 0.0);
}

TEST(Varifold, NonFiniteIntegrandIsFlagged)
{
    const auto v = double_plane();
    const auto r = integrate(v, [](const Vec& x, const Vec&) {
        return x.norm() < 0.2 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
    });
    EXPECT_FALSE(r.finite);
}

TEST(Varifold, ConstructorValidatesAtoms)
{
    EXPECT_THROW(OrientedVarifold({Atom{v3(0, 0, 0), v3(0, 0, 2), 1.0}}, 3), PreconditionError);
    EXPECT_THROW(OrientedVarifold({Atom{v3(0, 0, 0), v3(0, 0, 1), -1.0}}, 3), PreconditionError);
    EXPECT_THROW(OrientedVarifold({Atom{v2(0, 0), v3(0, 0, 1), 1.0}}, 3), PreconditionError);
}

TEST(Varifold, PushforwardOfSingleAtom)
{
    const OrientedVarifold v({Atom{v3(1, 2, 3), v3(0, 0, 1), 0.7}}, 3);
    const auto u = pushforward_unoriented(v);
    ASSERT_EQ(u.size(), 1u);
    EXPECT_EQ(u[0].projection, Mat(v3(1, 1, 0).asDiagonal()));
    EXPECT_EQ(u[0].mass, 0.7);
    EXPECT_EQ(u[0].x, v3(1, 2, 3));
}

TEST(Varifold, PushforwardMergesSheetsOfDoublePlane)
{
    const auto v = double_plane(1.0, 8);
    const auto u = pushforward_unoriented(v);
    EXPECT_EQ(unoriented_mass(u), v.mass());
    EXPECT_NEAR(unoriented_mass(u), 2.0 * kPi, 1e-12);
    for (const auto& a : u) {
        EXPECT_EQ(a.projection, Mat(v3(1, 1, 0).asDiagonal()));
    }
}

TEST(Varifold, ProjectionInvariantsOnRandomAtoms)
{
    std::mt19937_64 rng(20);
    for (int d : {2, 3}) {
        const auto v = random_atoms(rng, d, 10000);
        const auto u = pushforward_unoriented(v);
        EXPECT_EQ(unoriented_mass(u), v.mass());
        for (std::size_t k = 0; k < u.size(); ++k) {
            const Mat& p = u[k].projection;
            EXPECT_LE((p * p - p).norm(), 1e-12);
            EXPECT_LE(std::abs(p.trace() - (d - 1)), 1e-12);
            EXPECT_LE((p * v.atoms()[k].v).norm(), 1e-12);
        }
    }
}

TEST(Varifold, CurrentOfDoublePlaneVanishes)
{
    const auto v = double_plane();
    EXPECT_EQ(current_action(v, [](const Vec&) { return v3(0, 0, 1); }), 0.0);
    EXPECT_EQ(current_action(v, [](const Vec& x) { return v3(x(1), x(0) * x(0), 1.0 + x(0)); }), 0.0);
}

TEST(Varifold, CurrentOfUpwardDiscIsArea)
{
    // <*v, i_Y vol> = v . Y, and v = e3 on the disc.
    const auto v = Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), 1.0).sample_varifold(QuadratureRule{8, 1});
    EXPECT_NEAR(current_action(v, [](const Vec&) { return v3(0, 0, 1); }), kPi, 1e-12);
    EXPECT_EQ(current_action(v, [](const Vec& x) { return v3(x(1), -x(0), 0); }), 0.0);
}

TEST(Distance, IdenticalVarifoldsAreAtZero)
{
    const auto v = Hypersurface::sphere(v3(0, 0, 0), 1.0).sample_varifold(QuadratureRule{8, 1});
    EXPECT_EQ(bl_distance(v, v, default_dictionary(v, v)).distance, 0.0);
}

TEST(Distance, TranslationBound)
{
    const auto v = Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), 0.5).sample_varifold(QuadratureRule{8, 1});
    for (double delta : {0.01, 0.05, 0.2}) {
        const auto w = v.translated(v3(delta, 0, 0), "shifted");
        const double d = bl_distance(v, w, default_dictionary(v, w)).distance;
        EXPECT_GT(d, 0.0);
        EXPECT_LE(d, v.mass() * delta * (1.0 + 1e-9));
    }
}

TEST(Distance, PseudometricProperties)
{
    std::mt19937_64 rng(5);
    const auto a = random_atoms(rng, 3, 200);
    const auto b = random_atoms(rng, 3, 200);
    const auto c = random_atoms(rng, 3, 200);
    const auto dict = default_dictionary(a.combined(b, "ab"), c);
    const double ab = bl_distance(a, b, dict).distance;
    const double ba = bl_distance(b, a, dict).distance;
    const double bc = bl_distance(b, c, dict).distance;
    const double ac = bl_distance(a, c, dict).distance;
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ac, ab + bc + 1e-12);
}

TEST(Distance, DictionaryEntriesRespectBounds)
{
    std::mt19937_64 rng(9);
    const auto a = random_atoms(rng, 3, 50);
    for (const auto& phi : default_dictionary(a, a)) {
        EXPECT_LE(phi.sup_bound(), 1.0 + 1e-12);
        EXPECT_LE(phi.lipschitz_bound(), 1.0 + 1e-12);
    }
}

TEST(Distance, OversizedEntryIsRejected)
{
    const auto v = Hypersurface::plane(v3(0, 0, 0), v3(0, 0, 1), 0.5).sample_varifold(QuadratureRule{4, 1});
    const auto steep = TestFunction::bump_monomial(v3(0, 0, 0), 0.1, {0, 0, 0}).scaled(5.0);
    EXPECT_THROW(bl_distance(v, v, {steep}), DictionaryViolationError);
}

TEST(AtomCsv, RoundTripIsBitExact)
{
    std::mt19937_64 rng(1);
    for (int d : {2, 3}) {
        const auto v = random_atoms(rng, d, 100);
        std::stringstream buffer;
        write_atoms_csv(buffer, v);
        const auto back = read_atoms_csv(buffer);
        ASSERT_EQ(back.size(), v.size());
        EXPECT_EQ(back.ambient_dim(), d);
        for (std::size_t k = 0; k < v.size(); ++k) {
            EXPECT_EQ(back.atoms()[k].x, v.atoms()[k].x);
            EXPECT_EQ(back.atoms()[k].v, v.atoms()[k].v);
            EXPECT_EQ(back.atoms()[k].mass, v.atoms()[k].mass);
        }
    }
}

TEST(AtomCsv, MalformedInputReportsLine)
{
    const auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            read_atoms_csv(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of(""), 1u);
    EXPECT_EQ(line_of("a,b,c\n"), 1u);
    EXPECT_EQ(line_of("x1,x2,x3,v1,v2,v3,mass\n0,0,0,0,0,1,1\n0,0,abc,0,0,1,1\n"), 3u);
    EXPECT_EQ(line_of("x1,x2,x3,v1,v2,v3,mass\n0,0,0,0,0,1\n"), 2u);
    EXPECT_EQ(line_of("x1,x2,x3,v1,v2,v3,mass\n0,0,0,0,0,1,1\n0,0,0,0,0,3,1\n"), 3u);
    EXPECT_EQ(line_of("x1,x2,x3,v1,v2,v3,mass\n0,0,0,0,0,1,-1\n"), 2u);
}
