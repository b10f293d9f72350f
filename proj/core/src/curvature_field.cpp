#include "varicurv/curvature_field.hpp"

#include "varicurv/geometry.hpp"
#include "varicurv/varifold.hpp"

#include <iomanip>
#include <ostream>

namespace varicurv {

CurvatureField CurvatureField::from_atoms(std::vector<Mat> per_atom)
{
    CurvatureField field;
    const std::size_t n = per_atom.size();
    field.patch_of_atom.resize(n);
    field.patch_representative.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        field.patch_of_atom[k] = k;
        field.patch_representative[k] = k;
    }
    field.per_patch = per_atom;
    field.per_atom = std::move(per_atom);
    return field;
}

CurvatureField CurvatureField::zero(const OrientedVarifold& varifold)
{
    const int d = varifold.ambient_dim();
    return from_atoms(std::vector<Mat>(varifold.size(), Mat::Zero(d, d)));
}

CurvatureField CurvatureField::geometric(const OrientedVarifold& varifold, const Hypersurface& surface)
{
    std::vector<Mat> per_atom;
    per_atom.reserve(varifold.size());
    for (const auto& a : varifold.atoms()) {
        per_atom.push_back(surface.geometric_curvature(a.x, a.v));
    }
    CurvatureField field = from_atoms(std::move(per_atom));
    field.flags = ConstraintFlags{true, true, true};
    field.approximate = !surface.exact_curvature();
    return field;
}

CurvatureField CurvatureField::from_function(const OrientedVarifold& varifold,
                                             const std::function<Mat(const Vec&, const Vec&)>& w)
{
    std::vector<Mat> per_atom;
    per_atom.reserve(varifold.size());
    for (const auto& a : varifold.atoms()) {
        per_atom.push_back(w(a.x, a.v));
    }
    return from_atoms(std::move(per_atom));
}

void write_curvature_csv(std::ostream& out, const CurvatureField& field)
{
    out << "patch_id,i,a,W_ia\n";
    const auto saved = out.precision();
    out << std::setprecision(17);
    for (std::size_t p = 0; p < field.per_patch.size(); ++p) {
        const Mat& w = field.per_patch[p];
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index a = 0; a < w.cols(); ++a) {
                out << p << "," << (i + 1) << "," << (a + 1) << "," << w(i, a) << "\n";
            }
        }
    }
    out.precision(saved);
}

} // namespace varicurv
