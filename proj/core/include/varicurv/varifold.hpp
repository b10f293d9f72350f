#pragma once

#include "varicurv/types.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace varicurv {

class TestFunction;

/// One lifted quadrature point (x, v) carrying mass.
struct Atom {
    Vec x;
    Vec v;
    double mass = 0.0;
};

/// Unoriented image of an atom: v replaced by the plane projection I - v v^T.
struct UnorientedAtom {
    Vec x;
    Mat projection;
    double mass = 0.0;
};

/// Finite atom measure on Omega x S^n. Immutable once built.
class OrientedVarifold {
public:
    OrientedVarifold() = default;
    /// dim defaults to ambient_dim - 1 (codimension one in Euclidean space).
    /// Throws PreconditionError when an atom has |v| != 1 or negative mass.
    OrientedVarifold(std::vector<Atom> atoms, int ambient_dim, std::string provenance = {}, int dim = -1);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    int ambient_dim() const { return ambient_dim_; }
    int dim() const { return dim_; }
    const std::string& provenance() const { return provenance_; }

    double mass() const;
    /// Concatenation of two varifolds in the same ambient space.
    OrientedVarifold combined(const OrientedVarifold& other, std::string provenance) const;
    OrientedVarifold translated(const Vec& offset, std::string provenance) const;
    OrientedVarifold scaled(double factor, std::string provenance) const;
    OrientedVarifold filtered(const std::function<bool(const Atom&)>& keep, std::string provenance) const;

private:
    std::vector<Atom> atoms_;
    int ambient_dim_ = 3;
    int dim_ = 2;
    std::string provenance_;
};

struct IntegralResult {
    double value = 0.0;
    bool finite = true;
};

/// V(f) = sum of mass * f(x, v), accumulated in atom order with compensation.
IntegralResult integrate(const OrientedVarifold& varifold,
                         const std::function<double(const Vec&, const Vec&)>& f);

std::vector<UnorientedAtom> pushforward_unoriented(const OrientedVarifold& varifold);
double unoriented_mass(const std::vector<UnorientedAtom>& atoms);

/// Action of the associated current on the n-form i_Y(vol): the integral of v . Y(x).
double current_action(const OrientedVarifold& varifold, const std::function<Vec(const Vec&)>& vector_proxy);

struct DistanceResult {
    double distance = 0.0;     ///< lower bound for the bounded-Lipschitz distance
    std::size_t argmax = 0;    ///< dictionary index attaining it
};

/// max over the dictionary of |V1(phi) - V2(phi)|. Each dictionary entry is
/// checked first (sup <= 1, sampled Lipschitz <= 1 + 1e-6) on points drawn
/// near both varifolds; a violation throws DictionaryViolationError.
DistanceResult bl_distance(const OrientedVarifold& first, const OrientedVarifold& second,
                           const std::vector<TestFunction>& dictionary);

/// Sampled sup and Lipschitz estimate of one dictionary entry; throws on violation.
void validate_dictionary_entry(const TestFunction& phi, const std::vector<Vec>& sample_points, std::size_t index);

/// Coordinate bumps times {1, v_a, -v_a} centered on a grid^d lattice over the joint
/// bounding cube, each scaled so that sup <= 1 and Lipschitz <= 1 on |v| <= 1.
/// Bump radii are given in units of the cube's half-width.
std::vector<TestFunction> default_dictionary(const OrientedVarifold& first, const OrientedVarifold& second,
                                             int grid = 5, const std::vector<double>& relative_radii = {1.0, 2.0});

// Atom CSV: header x1..xd,v1..vd,mass; values written with 17 significant digits.
void write_atoms_csv(std::ostream& out, const OrientedVarifold& varifold);
OrientedVarifold read_atoms_csv(std::istream& in, std::string provenance = "csv");

} // namespace varicurv
