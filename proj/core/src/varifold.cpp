#include "varicurv/varifold.hpp"

#include "varicurv/test_function.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace varicurv {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kLipschitzSlack = 1e-6;

void require_dims(const OrientedVarifold& a, const OrientedVarifold& b)
{
    if (a.ambient_dim() != b.ambient_dim()) {
        throw PreconditionError("varifolds live in different ambient dimensions");
    }
}

} // namespace

OrientedVarifold::OrientedVarifold(std::vector<Atom> atoms, int ambient_dim, std::string provenance, int dim)
    : atoms_(std::move(atoms)), ambient_dim_(ambient_dim), dim_(dim < 0 ? ambient_dim - 1 : dim),
      provenance_(std::move(provenance))
{
    if (ambient_dim_ < 1 || ambient_dim_ > kMaxDim) {
        throw PreconditionError("ambient dimension must be 1..3");
    }
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        const Atom& a = atoms_[k];
        if (a.x.size() != ambient_dim_ || a.v.size() != ambient_dim_) {
            throw PreconditionError("atom " + std::to_string(k) + " has the wrong dimension");
        }
        if (!(std::abs(a.v.norm() - 1.0) <= kUnitTolerance)) {
            throw PreconditionError("atom " + std::to_string(k) + " has |v| != 1");
        }
        if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) {
            throw PreconditionError("atom " + std::to_string(k) + " has negative or non-finite mass");
        }
    }
}

double OrientedVarifold::mass() const
{
    CompensatedSum sum;
    for (const auto& a : atoms_) {
        sum.add(a.mass);
    }
    return sum.value();
}

OrientedVarifold OrientedVarifold::combined(const OrientedVarifold& other, std::string provenance) const
{
    if (!other.empty() && !empty()) {
        require_dims(*this, other);
    }
    std::vector<Atom> atoms = atoms_;
    atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
    const int d = empty() ? other.ambient_dim_ : ambient_dim_;
    const int n = empty() ? other.dim_ : dim_;
    return OrientedVarifold(std::move(atoms), d, std::move(provenance), n);
}

OrientedVarifold OrientedVarifold::translated(const Vec& offset, std::string provenance) const
{
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) {
        a.x += offset;
    }
    return OrientedVarifold(std::move(atoms), ambient_dim_, std::move(provenance), dim_);
}

OrientedVarifold OrientedVarifold::scaled(double factor, std::string provenance) const
{
    if (!(factor >= 0.0)) {
        throw PreconditionError("mass scale factor must be nonnegative");
    }
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) {
        a.mass *= factor;
    }
    return OrientedVarifold(std::move(atoms), ambient_dim_, std::move(provenance), dim_);
}

OrientedVarifold OrientedVarifold::filtered(const std::function<bool(const Atom&)>& keep,
                                            std::string provenance) const
{
    std::vector<Atom> atoms;
    for (const auto& a : atoms_) {
        if (keep(a)) {
            atoms.push_back(a);
        }
    }
    return OrientedVarifold(std::move(atoms), ambient_dim_, std::move(provenance), dim_);
}

IntegralResult integrate(const OrientedVarifold& varifold, const std::function<double(const Vec&, const Vec&)>& f)
{
    CompensatedSum sum;
    bool finite = true;
    for (const auto& a : varifold.atoms()) {
        const double value = f(a.x, a.v);
        if (!std::isfinite(value)) {
            finite = false;
        }
        sum.add(a.mass * value);
    }
    IntegralResult result;
    result.finite = finite;
    result.value = finite ? sum.value() : std::numeric_limits<double>::quiet_NaN();
    return result;
}

std::vector<UnorientedAtom> pushforward_unoriented(const OrientedVarifold& varifold)
{
    std::vector<UnorientedAtom> out;
    out.reserve(varifold.size());
    for (const auto& a : varifold.atoms()) {
        out.push_back(UnorientedAtom{a.x, normal_projection(a.v), a.mass});
    }
    return out;
}

double unoriented_mass(const std::vector<UnorientedAtom>& atoms)
{
    CompensatedSum sum;
    for (const auto& a : atoms) {
        sum.add(a.mass);
    }
    return sum.value();
}

double current_action(const OrientedVarifold& varifold, const std::function<Vec(const Vec&)>& vector_proxy)
{
    return integrate(varifold, [&](const Vec& x, const Vec& v) { return v.dot(vector_proxy(x)); }).value;
}

void validate_dictionary_entry(const TestFunction& phi, const std::vector<Vec>& sample_points, std::size_t index)
{
    const int d = phi.dim();
    std::mt19937_64 rng(0x5eed0000ULL + index);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double h = 1e-6 * std::max(1.0, phi.radius());
    double sup = 0.0;
    double lip = 0.0;
    for (const Vec& x : sample_points) {
        Vec v(d);
        for (int a = 0; a < d; ++a) {
            v(a) = gauss(rng);
        }
        v.normalize();
        const double f0 = phi.value(x, v);
        sup = std::max(sup, std::abs(f0));
        // Finite-difference quotient along a random joint direction in (x, v).
        Vec dx(d);
        Vec dv(d);
        for (int a = 0; a < d; ++a) {
            dx(a) = gauss(rng);
            dv(a) = gauss(rng);
        }
        const double len = std::sqrt(dx.squaredNorm() + dv.squaredNorm());
        dx /= len;
        dv /= len;
        const double f1 = phi.value(x + h * dx, v + h * dv);
        const double fm = phi.value(x - h * dx, v - h * dv);
        lip = std::max(lip, std::abs(f1 - fm) / (2.0 * h));
    }
    if (sup > 1.0 + kLipschitzSlack || lip > 1.0 + kLipschitzSlack) {
        std::ostringstream msg;
        msg << "dictionary entry " << index << " (" << phi.id() << ") violates bounds: sup " << sup
            << ", Lipschitz estimate " << lip;
        throw DictionaryViolationError(msg.str());
    }
}

DistanceResult bl_distance(const OrientedVarifold& first, const OrientedVarifold& second,
                           const std::vector<TestFunction>& dictionary)
{
    if (!first.empty() && !second.empty()) {
        require_dims(first, second);
    }
    // Validation points: atoms of both inputs, thinned, plus each entry's own center.
    std::vector<Vec> points;
    const auto collect = [&points](const OrientedVarifold& v) {
        const std::size_t stride = std::max<std::size_t>(1, v.size() / 200);
        for (std::size_t k = 0; k < v.size(); k += stride) {
            points.push_back(v.atoms()[k].x);
        }
    };
    collect(first);
    collect(second);

    DistanceResult result;
    for (std::size_t k = 0; k < dictionary.size(); ++k) {
        const TestFunction& phi = dictionary[k];
        std::vector<Vec> local;
        local.push_back(phi.center());
        for (const Vec& p : points) {
            if (!phi.outside_support(p)) {
                local.push_back(p);
            }
        }
        validate_dictionary_entry(phi, local, k);
        const auto f = [&phi](const Vec& x, const Vec& v) { return phi.value(x, v); };
        const double diff = std::abs(integrate(first, f).value - integrate(second, f).value);
        if (diff > result.distance) {
            result.distance = diff;
            result.argmax = k;
        }
    }
    return result;
}

std::vector<TestFunction> default_dictionary(const OrientedVarifold& first, const OrientedVarifold& second,
                                             int grid, const std::vector<double>& relative_radii)
{
    const int d = first.empty() ? second.ambient_dim() : first.ambient_dim();
    Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
    Vec hi = Vec::Constant(d, -std::numeric_limits<double>::infinity());
    for (const auto* v : {&first, &second}) {
        for (const auto& a : v->atoms()) {
            lo = lo.cwiseMin(a.x);
            hi = hi.cwiseMax(a.x);
        }
    }
    if (!std::isfinite(lo(0))) {
        return {};
    }
    const Vec center = 0.5 * (lo + hi);
    const double half = std::max(0.5 * (hi - lo).maxCoeff(), 1e-3);

    std::vector<TestFunction> out;
    for (double relative : relative_radii) {
        const double rho = relative * half;
        std::vector<TestFunction> proto;
        for (const auto& f : make_basis(center, half, d, BasisConfig{grid, 1.0, 0, 0, {}, {}})) {
            // Override the radius: dictionary bumps use the given absolute radii.
            proto.push_back(TestFunction(f.center(), rho, 1.0, Vec::Zero(d), Mat::Zero(d, d), 1.0, Vec::Zero(d),
                                         Mat::Zero(d, d)));
        }
        for (const auto& bump : proto) {
            for (int a = -1; a < d; ++a) {
                for (int sign : {1, -1}) {
                    if (a < 0 && sign < 0) {
                        continue;
                    }
                    Vec lin = Vec::Zero(d);
                    double c0 = 1.0;
                    std::string id;
                    std::ostringstream name;
                    name << "bump(r=" << rho << ",c=" << bump.center().transpose() << ")";
                    if (a >= 0) {
                        lin(a) = sign;
                        c0 = 0.0;
                        name << "*" << (sign > 0 ? "+" : "-") << "v" << (a + 1);
                    }
                    TestFunction phi(bump.center(), rho, 1.0, Vec::Zero(d), Mat::Zero(d, d), c0, lin,
                                     Mat::Zero(d, d), name.str());
                    const double bound = std::max(phi.sup_bound(), phi.lipschitz_bound());
                    out.push_back(phi.scaled(1.0 / std::max(bound, 1.0)));
                }
            }
        }
    }
    return out;
}

void write_atoms_csv(std::ostream& out, const OrientedVarifold& varifold)
{
    const int d = varifold.ambient_dim();
    for (int k = 1; k <= d; ++k) {
        out << "x" << k << ",";
    }
    for (int k = 1; k <= d; ++k) {
        out << "v" << k << ",";
    }
    out << "mass\n";
    const auto saved = out.precision();
    out << std::setprecision(17);
    for (const auto& a : varifold.atoms()) {
        for (int k = 0; k < d; ++k) {
            out << a.x(k) << ",";
        }
        for (int k = 0; k < d; ++k) {
            out << a.v(k) << ",";
        }
        out << a.mass << "\n";
    }
    out.precision(saved);
}

OrientedVarifold read_atoms_csv(std::istream& in, std::string provenance)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("missing header", 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    int d = 0;
    for (int cand = 1; cand <= kMaxDim; ++cand) {
        std::string expected;
        for (int k = 1; k <= cand; ++k) {
            expected += "x" + std::to_string(k) + ",";
        }
        for (int k = 1; k <= cand; ++k) {
            expected += "v" + std::to_string(k) + ",";
        }
        expected += "mass";
        if (line == expected) {
            d = cand;
        }
    }
    if (d == 0) {
        throw ParseError("header must be x1..xd,v1..vd,mass", line_no);
    }

    std::vector<Atom> atoms;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<double> values;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = std::min(line.find(',', start), line.size());
            const char* first = line.data() + start;
            const char* last = line.data() + comma;
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last) {
                throw ParseError("malformed number in column " + std::to_string(values.size() + 1), line_no);
            }
            values.push_back(value);
            start = comma + 1;
        }
        if (values.size() != static_cast<std::size_t>(2 * d + 1)) {
            throw ParseError("expected " + std::to_string(2 * d + 1) + " columns, found " +
                                 std::to_string(values.size()),
                             line_no);
        }
        Atom a{Vec(d), Vec(d), values.back()};
        for (int k = 0; k < d; ++k) {
            a.x(k) = values[static_cast<std::size_t>(k)];
            a.v(k) = values[static_cast<std::size_t>(d + k)];
        }
        if (!(std::abs(a.v.norm() - 1.0) <= kUnitTolerance)) {
            throw ParseError("|v| != 1", line_no);
        }
        if (!(a.mass >= 0.0)) {
            throw ParseError("negative mass", line_no);
        }
        atoms.push_back(std::move(a));
    }
    return OrientedVarifold(std::move(atoms), d, std::move(provenance));
}

} // namespace varicurv
