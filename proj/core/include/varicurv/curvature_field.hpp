#pragma once

#include "varicurv/types.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace varicurv {

class Hypersurface;
class OrientedVarifold;

struct ConstraintFlags {
    bool symmetric = false;
    bool tangential = false;
    bool odd = false;
};

/// Curvature coefficients W_ia evaluated at every atom, grouped into patches that
/// share parameters. per_patch holds W at each patch's representative atom.
struct CurvatureField {
    std::vector<Mat> per_atom;
    std::vector<std::size_t> patch_of_atom;
    std::vector<Mat> per_patch;
    std::vector<std::size_t> patch_representative;
    ConstraintFlags flags;
    bool approximate = false;

    std::size_t patch_count() const { return per_patch.size(); }

    /// One patch per atom.
    static CurvatureField from_atoms(std::vector<Mat> per_atom);
    static CurvatureField zero(const OrientedVarifold& varifold);
    /// Closed-form coefficients of the surface the atoms were sampled from.
    static CurvatureField geometric(const OrientedVarifold& varifold, const Hypersurface& surface);
    static CurvatureField from_function(const OrientedVarifold& varifold,
                                        const std::function<Mat(const Vec&, const Vec&)>& w);
};

/// CSV rows `patch_id,i,a,W_ia` with 1-based i, a.
void write_curvature_csv(std::ostream& out, const CurvatureField& field);

} // namespace varicurv
