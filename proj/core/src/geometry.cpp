#include "varicurv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace varicurv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec vec3(double a, double b, double c)
{
    Vec v(3);
    v << a, b, c;
    return v;
}

/// Gauss-Legendre nodes on [0, 1] with weights summing to 1.
std::vector<std::pair<double, double>> line_rule(int order)
{
    if (order <= 1) {
        return {{0.5, 1.0}};
    }
    const double h = 0.5 / std::sqrt(3.0);
    return {{0.5 - h, 0.5}, {0.5 + h, 0.5}};
}

int cells_for(double extent, double per_unit, int resolution)
{
    return std::max(1, static_cast<int>(std::ceil(extent * per_unit * resolution - 1e-9)));
}

/// Point on a parametrized surface: position, base normal, area element.
struct ParamPoint {
    Vec x;
    Vec normal;
    double jacobian;
};

/// Orthonormal in-plane frame for a unit normal in R^3.
std::pair<Vec, Vec> plane_frame(const Vec& normal)
{
    Eigen::Vector3d n = normal.head<3>();
    Eigen::Vector3d seed = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d e1 = (seed - seed.dot(n) * n).normalized();
    Eigen::Vector3d e2 = n.cross(e1);
    return {Vec(e1), Vec(e2)};
}

struct EdgeKey {
    int a;
    int b;
    bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

void validate_mesh_orientation(const Mesh& mesh)
{
    const std::size_t simplex = static_cast<std::size_t>(mesh.ambient_dim);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& el = mesh.elements[e];
        if (el.size() != simplex) {
            throw OrientationError("element " + std::to_string(e) + " has " + std::to_string(el.size()) +
                                   " vertices, expected " + std::to_string(simplex));
        }
        for (int idx : el) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= mesh.vertices.size()) {
                throw OrientationError("element " + std::to_string(e) + " references missing vertex " +
                                       std::to_string(idx));
            }
        }
    }
    if (simplex == 2) {
        std::vector<int> starts(mesh.vertices.size(), 0);
        std::vector<int> ends(mesh.vertices.size(), 0);
        for (const auto& el : mesh.elements) {
            ++starts[static_cast<std::size_t>(el[0])];
            ++ends[static_cast<std::size_t>(el[1])];
        }
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            if (starts[v] > 1 || ends[v] > 1) {
                throw OrientationError("inconsistent segment orientation at vertex " + std::to_string(v));
            }
        }
        return;
    }
    // Each directed edge may appear once; a shared edge must be traversed in both directions.
    std::map<EdgeKey, int> directed;
    for (const auto& el : mesh.elements) {
        for (int k = 0; k < 3; ++k) {
            EdgeKey key{el[static_cast<std::size_t>(k)], el[static_cast<std::size_t>((k + 1) % 3)]};
            if (++directed[key] > 1) {
                throw OrientationError("inconsistent triangle orientation across edge (" + std::to_string(key.a) +
                                       ", " + std::to_string(key.b) + ")");
            }
        }
    }
}

} // namespace

std::string to_string(SurfaceKind kind)
{
    switch (kind) {
    case SurfaceKind::plane:
        return "plane";
    case SurfaceKind::sphere:
        return "sphere";
    case SurfaceKind::torus:
        return "torus";
    case SurfaceKind::graph:
        return "graph";
    case SurfaceKind::latitude_circle:
        return "latitude-circle";
    case SurfaceKind::mesh:
        return "mesh";
    }
    return "unknown";
}

Hypersurface::Hypersurface(Spec spec, int ambient_dim, int dim, int orientation)
    : spec_(std::move(spec)), ambient_dim_(ambient_dim), dim_(dim), orientation_(orientation >= 0 ? 1 : -1)
{
}

Hypersurface Hypersurface::plane(Vec center, Vec normal, double radius, int orientation)
{
    const int d = static_cast<int>(center.size());
    if ((d != 2 && d != 3) || normal.size() != d) {
        throw PreconditionError("plane: ambient dimension must be 2 or 3");
    }
    if (!(radius > 0.0) || normal.norm() == 0.0) {
        throw PreconditionError("plane: radius and normal must be nonzero");
    }
    normal.normalize();
    return Hypersurface(PlaneSpec{std::move(center), std::move(normal), radius}, d, d - 1, orientation);
}

Hypersurface Hypersurface::sphere(Vec center, double radius, int orientation)
{
    return sphere_zone(std::move(center), radius, 0.0, kPi, orientation);
}

Hypersurface Hypersurface::sphere_zone(Vec center, double radius, double polar_min, double polar_max,
                                       int orientation)
{
    const int d = static_cast<int>(center.size());
    if (d != 2 && d != 3) {
        throw PreconditionError("sphere: ambient dimension must be 2 or 3");
    }
    if (!(radius > 0.0)) {
        throw PreconditionError("sphere: radius must be positive");
    }
    if (!(polar_min >= 0.0 && polar_max <= kPi && polar_min < polar_max)) {
        throw PreconditionError("sphere: polar range must satisfy 0 <= min < max <= pi");
    }
    return Hypersurface(SphereSpec{std::move(center), radius, polar_min, polar_max}, d, d - 1, orientation);
}

Hypersurface Hypersurface::torus(Vec center, double major_radius, double minor_radius, int orientation)
{
    if (center.size() != 3) {
        throw PreconditionError("torus: ambient dimension must be 3");
    }
    if (!(minor_radius > 0.0 && major_radius > minor_radius)) {
        throw PreconditionError("torus: need 0 < minor radius < major radius");
    }
    return Hypersurface(TorusSpec{std::move(center), major_radius, minor_radius}, 3, 2, orientation);
}

Hypersurface Hypersurface::graph(Vec center, double k1, double k2, double radius, int orientation)
{
    if (center.size() != 3) {
        throw PreconditionError("graph: ambient dimension must be 3");
    }
    if (!(radius > 0.0)) {
        throw PreconditionError("graph: radius must be positive");
    }
    return Hypersurface(GraphSpec{std::move(center), k1, k2, radius}, 3, 2, orientation);
}

Hypersurface Hypersurface::latitude_circle(double polar_angle, int orientation)
{
    if (!(polar_angle > 0.0 && polar_angle < kPi)) {
        throw PreconditionError("latitude circle: polar angle must lie in (0, pi)");
    }
    return Hypersurface(LatitudeCircleSpec{polar_angle}, 3, 1, orientation);
}

Hypersurface Hypersurface::from_mesh(Mesh mesh, int orientation)
{
    const int d = mesh.ambient_dim;
    if (d != 2 && d != 3) {
        throw PreconditionError("mesh: ambient dimension must be 2 or 3");
    }
    for (const auto& p : mesh.vertices) {
        if (p.size() != d) {
            throw PreconditionError("mesh: vertex dimension mismatch");
        }
    }
    validate_mesh_orientation(mesh);

    MeshSurfaceSpec spec;
    const std::size_t ne = mesh.elements.size();
    spec.element_normals.resize(ne);
    spec.element_measure.resize(ne);
    std::vector<Vec> vertex_normals(mesh.vertices.size(), Vec::Zero(d));
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& el = mesh.elements[e];
        const Vec& a = mesh.vertices[static_cast<std::size_t>(el[0])];
        const Vec& b = mesh.vertices[static_cast<std::size_t>(el[1])];
        Vec n(d);
        double measure = 0.0;
        if (d == 2) {
            const Vec t = b - a;
            measure = t.norm();
            n << -t(1), t(0);
        } else {
            const Vec& c = mesh.vertices[static_cast<std::size_t>(el[2])];
            const Eigen::Vector3d cr = (b - a).head<3>().cross((c - a).head<3>());
            measure = 0.5 * cr.norm();
            n = cr;
        }
        if (!(measure > 0.0)) {
            throw DegenerateElementError("mesh element " + std::to_string(e) + " has zero measure");
        }
        n.normalize();
        spec.element_normals[e] = n;
        spec.element_measure[e] = measure;
        for (int idx : el) {
            vertex_normals[static_cast<std::size_t>(idx)] += measure * n;
        }
    }
    for (auto& n : vertex_normals) {
        const double len = n.norm();
        if (len > 0.0) {
            n /= len;
        }
    }

    // Per-element shape operator: symmetric tangential W with W^T e ~ (change of vertex normal) along edges.
    spec.element_curvature.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& el = mesh.elements[e];
        const Vec& nrm = spec.element_normals[e];
        if (d == 2) {
            const Vec t = (mesh.vertices[static_cast<std::size_t>(el[1])] -
                           mesh.vertices[static_cast<std::size_t>(el[0])]);
            const double len = t.norm();
            const Vec tu = t / len;
            const Vec dn = vertex_normals[static_cast<std::size_t>(el[1])] -
                           vertex_normals[static_cast<std::size_t>(el[0])];
            const double k = dn.dot(tu) / len;
            spec.element_curvature[e] = k * tu * tu.transpose();
            continue;
        }
        auto [u, w] = plane_frame(nrm);
        Eigen::Matrix<double, 6, 3> lhs = Eigen::Matrix<double, 6, 3>::Zero();
        Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
        for (int k = 0; k < 3; ++k) {
            const auto i0 = static_cast<std::size_t>(el[static_cast<std::size_t>(k)]);
            const auto i1 = static_cast<std::size_t>(el[static_cast<std::size_t>((k + 1) % 3)]);
            const Vec edge = mesh.vertices[i1] - mesh.vertices[i0];
            const Vec dn = vertex_normals[i1] - vertex_normals[i0];
            const double eu = edge.dot(u);
            const double ew = edge.dot(w);
            // [a b; b c] (eu, ew) = (dn.u, dn.w)
            lhs.row(2 * k) << eu, ew, 0.0;
            lhs.row(2 * k + 1) << 0.0, eu, ew;
            rhs(2 * k) = dn.dot(u);
            rhs(2 * k + 1) = dn.dot(w);
        }
        const Eigen::Vector3d abc = lhs.colPivHouseholderQr().solve(rhs);
        Mat wmat = abc(0) * u * u.transpose() + abc(1) * (u * w.transpose() + w * u.transpose()) +
                   abc(2) * w * w.transpose();
        spec.element_curvature[e] = wmat;
    }
    spec.mesh = std::move(mesh);
    return Hypersurface(std::move(spec), d, d - 1, orientation);
}

SurfaceKind Hypersurface::kind() const
{
    return std::visit(Overloaded{[](const PlaneSpec&) { return SurfaceKind::plane; },
                                 [](const SphereSpec&) { return SurfaceKind::sphere; },
                                 [](const TorusSpec&) { return SurfaceKind::torus; },
                                 [](const GraphSpec&) { return SurfaceKind::graph; },
                                 [](const LatitudeCircleSpec&) { return SurfaceKind::latitude_circle; },
                                 [](const MeshSurfaceSpec&) { return SurfaceKind::mesh; }},
                      spec_);
}

Hypersurface Hypersurface::flipped() const
{
    Hypersurface copy = *this;
    copy.orientation_ = -orientation_;
    return copy;
}

double Hypersurface::exact_measure() const
{
    const int d = ambient_dim_;
    return std::visit(
        Overloaded{[d](const PlaneSpec& s) { return d == 2 ? 2.0 * s.radius : kPi * s.radius * s.radius; },
                   [d](const SphereSpec& s) {
                       if (d == 2) {
                           return 2.0 * kPi * s.radius;
                       }
                       return 2.0 * kPi * s.radius * s.radius * (std::cos(s.polar_min) - std::cos(s.polar_max));
                   },
                   [](const TorusSpec& s) { return 4.0 * kPi * kPi * s.major_radius * s.minor_radius; },
                   [](const GraphSpec&) { return std::numeric_limits<double>::quiet_NaN(); },
                   [](const LatitudeCircleSpec& s) { return 2.0 * kPi * std::sin(s.polar_angle); },
                   [](const MeshSurfaceSpec& s) {
                       double total = 0.0;
                       for (double m : s.element_measure) {
                           total += m;
                       }
                       return total;
                   }},
        spec_);
}

std::string Hypersurface::describe() const
{
    std::ostringstream out;
    out.precision(17);
    out << to_string(kind()) << "(d=" << ambient_dim_ << ", orientation=" << orientation_;
    std::visit(Overloaded{[&](const PlaneSpec& s) {
                              out << ", center=" << s.center.transpose() << ", normal=" << s.normal.transpose()
                                  << ", radius=" << s.radius;
                          },
                          [&](const SphereSpec& s) {
                              out << ", center=" << s.center.transpose() << ", radius=" << s.radius
                                  << ", polar=[" << s.polar_min << "," << s.polar_max << "]";
                          },
                          [&](const TorusSpec& s) {
                              out << ", center=" << s.center.transpose() << ", R=" << s.major_radius
                                  << ", r=" << s.minor_radius;
                          },
                          [&](const GraphSpec& s) {
                              out << ", center=" << s.center.transpose() << ", k1=" << s.k1 << ", k2=" << s.k2
                                  << ", radius=" << s.radius;
                          },
                          [&](const LatitudeCircleSpec& s) { out << ", polar_angle=" << s.polar_angle; },
                          [&](const MeshSurfaceSpec& s) {
                              out << ", vertices=" << s.mesh.vertices.size()
                                  << ", elements=" << s.mesh.elements.size();
                          }},
               spec_);
    out << ")";
    return out.str();
}

double Hypersurface::off_surface_distance(const Vec& x) const
{
    if (x.size() != ambient_dim_) {
        return std::numeric_limits<double>::infinity();
    }
    return std::visit(
        Overloaded{
            [&](const PlaneSpec& s) {
                const Vec rel = x - s.center;
                const double normal_part = rel.dot(s.normal);
                const double radial = (rel - normal_part * s.normal).norm();
                return std::abs(normal_part) + std::max(0.0, radial - s.radius);
            },
            [&](const SphereSpec& s) {
                const Vec rel = x - s.center;
                double dist = std::abs(rel.norm() - s.radius);
                if (ambient_dim_ == 3 && rel.norm() > 0.0) {
                    const double polar = std::acos(std::clamp(rel(2) / rel.norm(), -1.0, 1.0));
                    const double outside = std::max({0.0, s.polar_min - polar, polar - s.polar_max});
                    dist += s.radius * outside;
                }
                return dist;
            },
            [&](const TorusSpec& s) {
                const Vec rel = x - s.center;
                const double rho = std::hypot(rel(0), rel(1));
                return std::abs(std::hypot(rho - s.major_radius, rel(2)) - s.minor_radius);
            },
            [&](const GraphSpec& s) {
                const double dx = x(0) - s.center(0);
                const double dy = x(1) - s.center(1);
                const double h = s.center(2) + 0.5 * (s.k1 * dx * dx + s.k2 * dy * dy);
                return std::abs(x(2) - h) + std::max(0.0, std::hypot(dx, dy) - s.radius);
            },
            [&](const LatitudeCircleSpec& s) {
                const double rho = std::hypot(x(0), x(1));
                return std::abs(rho - std::sin(s.polar_angle)) + std::abs(x(2) - std::cos(s.polar_angle));
            },
            [&](const MeshSurfaceSpec&) {
                try {
                    locate_element(x);
                    return 0.0;
                } catch (const PointOffSurfaceError&) {
                    return std::numeric_limits<double>::infinity();
                }
            }},
        spec_);
}

void Hypersurface::require_on_surface(const Vec& x) const
{
    const double dist = off_surface_distance(x);
    if (!(dist <= kProjectionTolerance)) {
        std::ostringstream msg;
        msg << "point off surface " << to_string(kind()) << " (distance " << dist << ")";
        throw PointOffSurfaceError(msg.str());
    }
}

std::size_t Hypersurface::locate_element(const Vec& x) const
{
    const auto& s = std::get<MeshSurfaceSpec>(spec_);
    const auto& m = s.mesh;
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const auto& el = m.elements[e];
        const Vec& a = m.vertices[static_cast<std::size_t>(el[0])];
        const Vec& n = s.element_normals[e];
        if (std::abs((x - a).dot(n)) > kProjectionTolerance) {
            continue;
        }
        if (ambient_dim_ == 2) {
            const Vec t = m.vertices[static_cast<std::size_t>(el[1])] - a;
            const double u = (x - a).dot(t) / t.squaredNorm();
            if (u >= -1e-12 && u <= 1.0 + 1e-12) {
                return e;
            }
            continue;
        }
        const Vec& b = m.vertices[static_cast<std::size_t>(el[1])];
        const Vec& c = m.vertices[static_cast<std::size_t>(el[2])];
        Eigen::Matrix<double, 3, 2> basis;
        basis.col(0) = (b - a).head<3>();
        basis.col(1) = (c - a).head<3>();
        const Eigen::Vector2d uv = basis.colPivHouseholderQr().solve(Eigen::Vector3d((x - a).head<3>()));
        if (uv(0) >= -1e-12 && uv(1) >= -1e-12 && uv.sum() <= 1.0 + 1e-12) {
            return e;
        }
    }
    throw PointOffSurfaceError("point does not lie on any mesh element");
}

Vec Hypersurface::base_normal(const Vec& x) const
{
    return std::visit(
        Overloaded{[&](const PlaneSpec& s) -> Vec { return s.normal; },
                   [&](const SphereSpec& s) -> Vec { return (x - s.center).normalized(); },
                   [&](const TorusSpec& s) -> Vec {
                       const Vec rel = x - s.center;
                       const double rho = std::hypot(rel(0), rel(1));
                       Vec n = vec3((rho - s.major_radius) * rel(0) / rho, (rho - s.major_radius) * rel(1) / rho,
                                    rel(2));
                       return n.normalized();
                   },
                   [&](const GraphSpec& s) -> Vec {
                       const double hx = s.k1 * (x(0) - s.center(0));
                       const double hy = s.k2 * (x(1) - s.center(1));
                       return vec3(-hx, -hy, 1.0).normalized();
                   },
                   [&](const LatitudeCircleSpec& s) -> Vec {
                       const double rho = std::hypot(x(0), x(1));
                       const double c = std::cos(s.polar_angle);
                       return vec3(c * x(0) / rho, c * x(1) / rho, -std::sin(s.polar_angle));
                   },
                   [&](const MeshSurfaceSpec& s) -> Vec { return s.element_normals[locate_element(x)]; }},
        spec_);
}

Mat Hypersurface::base_curvature(const Vec& x) const
{
    const int d = ambient_dim_;
    return std::visit(
        Overloaded{[&](const PlaneSpec&) -> Mat { return Mat::Zero(d, d); },
                   [&](const SphereSpec& s) -> Mat {
                       const Vec n = (x - s.center).normalized();
                       return normal_projection(n) / s.radius;
                   },
                   [&](const TorusSpec& s) -> Mat {
                       const Vec rel = x - s.center;
                       const double rho = std::hypot(rel(0), rel(1));
                       const double cos_w = (rho - s.major_radius) / s.minor_radius;
                       const double sin_w = rel(2) / s.minor_radius;
                       const Vec eu = vec3(-rel(1) / rho, rel(0) / rho, 0.0);
                       const Vec ew = vec3(-sin_w * rel(0) / rho, -sin_w * rel(1) / rho, cos_w);
                       const double ku = cos_w / rho;
                       const double kw = 1.0 / s.minor_radius;
                       return ku * eu * eu.transpose() + kw * ew * ew.transpose();
                   },
                   [&](const GraphSpec& s) -> Mat {
                       // nu = (-hx, -hy, 1) / q; differentiate in the graph parameters and
                       // solve J X_k = d nu / d u_k on the tangent plane.
                       const double hx = s.k1 * (x(0) - s.center(0));
                       const double hy = s.k2 * (x(1) - s.center(1));
                       const double q = std::sqrt(1.0 + hx * hx + hy * hy);
                       const Eigen::Vector3d g(-hx, -hy, 1.0);
                       const Eigen::Vector3d dgx(-s.k1, 0.0, 0.0);
                       const Eigen::Vector3d dgy(0.0, -s.k2, 0.0);
                       const double dqx = hx * s.k1 / q;
                       const double dqy = hy * s.k2 / q;
                       const Eigen::Vector3d dnx = dgx / q - g * dqx / (q * q);
                       const Eigen::Vector3d dny = dgy / q - g * dqy / (q * q);
                       Eigen::Matrix<double, 3, 2> tangents;
                       tangents << 1.0, 0.0, 0.0, 1.0, hx, hy;
                       Eigen::Matrix<double, 3, 2> dn;
                       dn.col(0) = dnx;
                       dn.col(1) = dny;
                       const Eigen::Matrix2d gram = tangents.transpose() * tangents;
                       const Eigen::Matrix3d jac = dn * gram.inverse() * tangents.transpose();
                       const Eigen::Matrix3d w = jac.transpose();
                       return Mat(0.5 * (w + w.transpose()));
                   },
                   [&](const LatitudeCircleSpec& s) -> Mat {
                       const double rho = std::hypot(x(0), x(1));
                       const Vec t = vec3(-x(1) / rho, x(0) / rho, 0.0);
                       return (std::cos(s.polar_angle) / std::sin(s.polar_angle)) * t * t.transpose();
                   },
                   [&](const MeshSurfaceSpec& s) -> Mat { return s.element_curvature[locate_element(x)]; }},
        spec_);
}

Vec Hypersurface::unit_normal(const Vec& x) const
{
    require_on_surface(x);
    return static_cast<double>(orientation_) * base_normal(x);
}

Mat Hypersurface::geometric_curvature(const Vec& x, const Vec& v) const
{
    require_on_surface(x);
    const Vec n = base_normal(x);
    if (v.size() != ambient_dim_) {
        throw NotNormalError("direction has wrong dimension");
    }
    const double c = v.dot(n);
    if (!(std::abs(std::abs(c) - 1.0) <= kNormalTolerance)) {
        std::ostringstream msg;
        msg << "v is not a unit normal (|v . nu| = " << std::abs(c) << ")";
        throw NotNormalError(msg.str());
    }
    const double sheet = c > 0.0 ? 1.0 : -1.0;
    return sheet * base_curvature(x);
}

std::vector<Atom> Hypersurface::sample(const QuadratureRule& rule, int theta1, int theta2) const
{
    return sample(
        rule, [theta1](const Vec&) { return theta1; }, [theta2](const Vec&) { return theta2; });
}

OrientedVarifold Hypersurface::sample_varifold(const QuadratureRule& rule, int theta1, int theta2) const
{
    return OrientedVarifold(sample(rule, theta1, theta2), ambient_dim_, describe(), dim_);
}

std::vector<Atom> Hypersurface::sample(const QuadratureRule& rule, const Multiplicity& theta1,
                                       const Multiplicity& theta2) const
{
    if (rule.resolution < 1 || (rule.order != 1 && rule.order != 2)) {
        throw PreconditionError("quadrature rule: resolution >= 1 and order in {1, 2} required");
    }
    const int n_res = rule.resolution;
    const auto nodes = line_rule(rule.order);
    const double sign = static_cast<double>(orientation_);
    std::vector<Atom> atoms;

    auto emit = [&](const Vec& x, const Vec& base, double measure) {
        if (!(measure > 0.0)) {
            throw DegenerateElementError("quadrature element with non-positive measure");
        }
        const int t1 = theta1(x);
        const int t2 = theta2(x);
        if (t1 < 0 || t2 < 0) {
            throw PreconditionError("multiplicities must be nonnegative");
        }
        const Vec xi = sign * base;
        if (t1 > 0) {
            atoms.push_back(Atom{x, xi, t1 * measure});
        }
        if (t2 > 0) {
            atoms.push_back(Atom{x, -xi, t2 * measure});
        }
    };

    // Tensor-product rule over a 2-parameter rectangle; point(u, w) gives position, normal, jacobian.
    auto tensor_2d = [&](double u0, double u1, int nu, double w0, double w1, int nw, auto&& point) {
        const double du = (u1 - u0) / nu;
        const double dw = (w1 - w0) / nw;
        for (int i = 0; i < nu; ++i) {
            for (int j = 0; j < nw; ++j) {
                for (const auto& [su, wu] : nodes) {
                    for (const auto& [sw, ww] : nodes) {
                        const ParamPoint p = point(u0 + (i + su) * du, w0 + (j + sw) * dw);
                        emit(p.x, p.normal, p.jacobian * du * dw * wu * ww);
                    }
                }
            }
        }
    };
    auto tensor_1d = [&](double u0, double u1, int nu, auto&& point) {
        const double du = (u1 - u0) / nu;
        for (int i = 0; i < nu; ++i) {
            for (const auto& [su, wu] : nodes) {
                const ParamPoint p = point(u0 + (i + su) * du);
                emit(p.x, p.normal, p.jacobian * du * wu);
            }
        }
    };

    std::visit(
        Overloaded{
            [&](const PlaneSpec& s) {
                if (ambient_dim_ == 2) {
                    const Vec t = (Vec(2) << -s.normal(1), s.normal(0)).finished();
                    tensor_1d(-s.radius, s.radius, cells_for(2.0 * s.radius, 1.0, n_res), [&](double u) {
                        return ParamPoint{s.center + u * t, s.normal, 1.0};
                    });
                    return;
                }
                auto [e1, e2] = plane_frame(s.normal);
                tensor_2d(0.0, s.radius, cells_for(s.radius, 1.0, n_res), 0.0, 2.0 * kPi, 4 * n_res,
                          [&](double r, double a) {
                              return ParamPoint{s.center + r * (std::cos(a) * e1 + std::sin(a) * e2), s.normal, r};
                          });
            },
            [&](const SphereSpec& s) {
                if (ambient_dim_ == 2) {
                    tensor_1d(0.0, 2.0 * kPi, 4 * n_res, [&](double a) {
                        Vec n = (Vec(2) << std::cos(a), std::sin(a)).finished();
                        return ParamPoint{s.center + s.radius * n, n, s.radius};
                    });
                    return;
                }
                const int n_polar = cells_for(s.polar_max - s.polar_min, 1.0 / kHalfPi, n_res);
                tensor_2d(s.polar_min, s.polar_max, n_polar, 0.0, 2.0 * kPi, 4 * n_res, [&](double th, double ph) {
                    Vec n = vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
                    return ParamPoint{s.center + s.radius * n, n, s.radius * s.radius * std::sin(th)};
                });
            },
            [&](const TorusSpec& s) {
                tensor_2d(0.0, 2.0 * kPi, 4 * n_res, 0.0, 2.0 * kPi, 4 * n_res, [&](double u, double w) {
                    Vec n = vec3(std::cos(w) * std::cos(u), std::cos(w) * std::sin(u), std::sin(w));
                    const double rho = s.major_radius + s.minor_radius * std::cos(w);
                    Vec x = s.center + vec3(rho * std::cos(u), rho * std::sin(u), s.minor_radius * std::sin(w));
                    return ParamPoint{x, n, rho * s.minor_radius};
                });
            },
            [&](const GraphSpec& s) {
                tensor_2d(0.0, s.radius, cells_for(s.radius, 1.0, n_res), 0.0, 2.0 * kPi, 4 * n_res,
                          [&](double r, double a) {
                              const double dx = r * std::cos(a);
                              const double dy = r * std::sin(a);
                              const double hx = s.k1 * dx;
                              const double hy = s.k2 * dy;
                              Vec x = s.center + vec3(dx, dy, 0.5 * (s.k1 * dx * dx + s.k2 * dy * dy));
                              const double q = std::sqrt(1.0 + hx * hx + hy * hy);
                              return ParamPoint{x, vec3(-hx / q, -hy / q, 1.0 / q), q * r};
                          });
            },
            [&](const LatitudeCircleSpec& s) {
                const double st = std::sin(s.polar_angle);
                const double ct = std::cos(s.polar_angle);
                tensor_1d(0.0, 2.0 * kPi, 4 * n_res, [&](double ph) {
                    Vec x = vec3(st * std::cos(ph), st * std::sin(ph), ct);
                    Vec n = vec3(ct * std::cos(ph), ct * std::sin(ph), -st);
                    return ParamPoint{x, n, st};
                });
            },
            [&](const MeshSurfaceSpec& s) {
                const auto& m = s.mesh;
                for (std::size_t e = 0; e < m.elements.size(); ++e) {
                    const auto& el = m.elements[e];
                    const Vec& a = m.vertices[static_cast<std::size_t>(el[0])];
                    const Vec& b = m.vertices[static_cast<std::size_t>(el[1])];
                    const double measure = s.element_measure[e];
                    if (ambient_dim_ == 2) {
                        for (const auto& [su, wu] : nodes) {
                            emit(a + su * (b - a), s.element_normals[e], measure * wu);
                        }
                        continue;
                    }
                    const Vec& c = m.vertices[static_cast<std::size_t>(el[2])];
                    if (rule.order == 1) {
                        emit((a + b + c) / 3.0, s.element_normals[e], measure);
                    } else {
                        const double p = 2.0 / 3.0;
                        const double q = 1.0 / 6.0;
                        emit(p * a + q * b + q * c, s.element_normals[e], measure / 3.0);
                        emit(q * a + p * b + q * c, s.element_normals[e], measure / 3.0);
                        emit(q * a + q * b + p * c, s.element_normals[e], measure / 3.0);
                    }
                }
            }},
        spec_);
    return atoms;
}

Mesh icosphere_mesh(double radius, int subdivisions)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                                          {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                                          {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : verts) {
        v.normalize();
    }
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) {
                return it->second;
            }
            verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    Mesh mesh;
    mesh.ambient_dim = 3;
    for (const auto& v : verts) {
        mesh.vertices.emplace_back(Vec(radius * v));
    }
    for (const auto& f : faces) {
        mesh.elements.push_back({f[0], f[1], f[2]});
    }
    return mesh;
}

Mesh polygon_mesh(double radius, int segments)
{
    Mesh mesh;
    mesh.ambient_dim = 2;
    for (int k = 0; k < segments; ++k) {
        const double a = 2.0 * kPi * k / segments;
        mesh.vertices.emplace_back((Vec(2) << radius * std::cos(a), radius * std::sin(a)).finished());
    }
    // Counterclockwise traversal; the segment normal (-t2, t1) then points inward.
    for (int k = 0; k < segments; ++k) {
        mesh.elements.push_back({k, (k + 1) % segments});
    }
    return mesh;
}

} // namespace varicurv
