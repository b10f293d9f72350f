#pragma once

#include "varicurv/types.hpp"
#include "varicurv/varifold.hpp"

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace varicurv {

/// Absolute tolerance, in length units, for a point to count as lying on a surface.
inline constexpr double kProjectionTolerance = 1e-10;
/// Tolerance on | |v . nu| - 1 | when a direction is required to be a unit normal.
inline constexpr double kNormalTolerance = 1e-9;

/// Element count per quarter turn (angular parameters) or per unit length
/// (radial/linear parameters), plus the rule order: 1 is the midpoint/centroid
/// rule, 2 is a two-point Gauss rule per parameter direction (three points per triangle).
struct QuadratureRule {
    int resolution = 16;
    int order = 1;
};

/// Simplicial mesh: triangles in R^3 or segments in R^2, consistently oriented.
struct Mesh {
    int ambient_dim = 3;
    std::vector<Vec> vertices;
    std::vector<std::vector<int>> elements;
};

struct PlaneSpec {
    Vec center;
    Vec normal;   ///< base normal (unit)
    double radius = 1.0;
};

/// Round sphere (circle when d = 2). Polar range restricts a sphere in R^3
/// to a zone; the base normal is outward.
struct SphereSpec {
    Vec center;
    double radius = 1.0;
    double polar_min = 0.0;
    double polar_max = 0.0; ///< set to pi by the factory
};

/// Torus of revolution around the x3 axis; base normal is outward.
struct TorusSpec {
    Vec center;
    double major_radius = 2.0;
    double minor_radius = 0.5;
};

/// Graph x3 = c3 + (k1 (x1-c1)^2 + k2 (x2-c2)^2) / 2 over a disc; base normal points up.
struct GraphSpec {
    Vec center;
    double k1 = 0.0;
    double k2 = 0.0;
    double radius = 1.0;
};

/// Circle of constant polar angle on the unit sphere S^2 in R^3, as a curve in
/// the Riemannian ambient S^2. Base normal is e_theta (towards increasing polar angle).
struct LatitudeCircleSpec {
    double polar_angle = 0.0;
};

struct MeshSurfaceSpec {
    Mesh mesh;
    std::vector<Vec> element_normals;  ///< base normals from vertex order
    std::vector<Mat> element_curvature; ///< fitted shape operators (approximate)
    std::vector<double> element_measure;
};

enum class SurfaceKind { plane, sphere, torus, graph, latitude_circle, mesh };

std::string to_string(SurfaceKind kind);

/// Oriented hypersurface: analytic catalog entry or simplicial mesh.
///
/// Curvature coefficients follow W_ia = delta_i(nu_a) on the sheet v = nu and
/// the negative on v = -nu, so W depends on v only, never on the orientation sign.
class Hypersurface {
public:
    static Hypersurface plane(Vec center, Vec normal, double radius, int orientation = 1);
    static Hypersurface sphere(Vec center, double radius, int orientation = 1);
    static Hypersurface sphere_zone(Vec center, double radius, double polar_min, double polar_max,
                                    int orientation = 1);
    static Hypersurface torus(Vec center, double major_radius, double minor_radius, int orientation = 1);
    static Hypersurface graph(Vec center, double k1, double k2, double radius, int orientation = 1);
    static Hypersurface latitude_circle(double polar_angle, int orientation = 1);
    /// Validates adjacent-element orientation consistency; throws OrientationError on failure.
    static Hypersurface from_mesh(Mesh mesh, int orientation = 1);

    SurfaceKind kind() const;
    int ambient_dim() const { return ambient_dim_; }
    /// Dimension n of the surface itself (d - 1 except for curves on S^2).
    int dim() const { return dim_; }
    int orientation() const { return orientation_; }
    Hypersurface flipped() const;
    /// False for meshes, whose curvature is fitted per element.
    bool exact_curvature() const { return kind() != SurfaceKind::mesh; }
    /// Closed-form area (length) where one exists; NaN otherwise.
    double exact_measure() const;
    std::string describe() const;

    /// Distance-like defect of x from the surface (0 on it).
    double off_surface_distance(const Vec& x) const;
    Vec unit_normal(const Vec& x) const;
    Mat geometric_curvature(const Vec& x, const Vec& v) const;

    using Multiplicity = std::function<int(const Vec&)>;
    std::vector<Atom> sample(const QuadratureRule& rule, const Multiplicity& theta1,
                             const Multiplicity& theta2) const;
    std::vector<Atom> sample(const QuadratureRule& rule, int theta1 = 1, int theta2 = 0) const;
    OrientedVarifold sample_varifold(const QuadratureRule& rule, int theta1 = 1, int theta2 = 0) const;

    const std::variant<PlaneSpec, SphereSpec, TorusSpec, GraphSpec, LatitudeCircleSpec, MeshSurfaceSpec>&
    spec() const
    {
        return spec_;
    }

private:
    using Spec = std::variant<PlaneSpec, SphereSpec, TorusSpec, GraphSpec, LatitudeCircleSpec, MeshSurfaceSpec>;
    Hypersurface(Spec spec, int ambient_dim, int dim, int orientation);

    Vec base_normal(const Vec& x) const;
    Mat base_curvature(const Vec& x) const;
    void require_on_surface(const Vec& x) const;
    std::size_t locate_element(const Vec& x) const;

    Spec spec_;
    int ambient_dim_;
    int dim_;
    int orientation_;
};

/// Uniform refinement helpers for the built-in mesh catalog.
Mesh icosphere_mesh(double radius, int subdivisions);
Mesh polygon_mesh(double radius, int segments);

} // namespace varicurv
