#pragma once

#include "varicurv/curvature_field.hpp"
#include "varicurv/identities.hpp"
#include "varicurv/test_function.hpp"
#include "varicurv/types.hpp"
#include "varicurv/varifold.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varicurv {

/// How atoms are grouped into patches that share curvature parameters.
/// Inside a patch, atoms on the opposite sheet from the representative form their
/// own parameter group unless oddness is enforced.
struct PatchSpec {
    enum class Kind { single, grid, per_pair, kmeans };
    Kind kind = Kind::grid;
    int grid_cells = 3;          ///< cells per axis over the atom bounding cube
    int atoms_per_patch = 50;    ///< target for kmeans
    std::string describe() const;
};

struct RecoveryOptions {
    ConstraintFlags constraints{true, true, false};
    PatchSpec patches;
    /// Absolute Tikhonov weight; default is relative_lambda * max diag of the normal matrix.
    std::optional<double> lambda;
    double relative_lambda = 1e-8;
    /// Relative eigenvalue threshold for rank and the ill-posedness flag.
    double rank_tolerance = 1e-8;
    int jobs = 1;
    std::string basis_description;
};

struct RecoveryReport {
    double relative_residual = 0.0;
    double residual_norm = 0.0;
    double lambda = 0.0;
    std::size_t equations = 0;
    std::size_t unknowns = 0;
    std::size_t rank = 0;
    double min_relative_eigenvalue = 0.0;
    bool ill_posed = false;
    double symmetry_defect = 0.0;
    double tangency_defect = 0.0;
    double oddness_defect = 0.0;
    bool no_pairs = false;
    double l1_norm = 0.0; ///< integral of |W| dV
    double l2_norm = 0.0; ///< (integral of |W|^2 dV)^(1/2)
    std::string basis;
    std::string patches;
    std::string mode;
};

struct Recovery {
    CurvatureField field;
    RecoveryReport report;
};

/// Minimizes the squared curvature-identity residual over the basis plus lambda |params|^2.
/// W is parametrized per patch in a frame [E, v] carried along by polar
/// orthonormalization from the representative atom, so a constant parameter matrix
/// can follow the rotation of the normal across a patch.
// TODO: affine-in-x patch parameters. With constant ones, non-umbilic surfaces (torus,
// saddle graphs) stall around 5-10% relative error at default resolutions.
Recovery recover_curvature(const OrientedVarifold& varifold, const std::vector<TestFunction>& basis,
                           const RecoveryOptions& options = {});

/// Patch id per atom for the given spec (deterministic, atom-index ordered ids).
std::vector<std::size_t> assign_patches(const OrientedVarifold& varifold, const PatchSpec& spec);

struct OddnessResult {
    double defect = 0.0;
    std::size_t pairs = 0;
    bool no_pairs = false;
};

/// Pairs atoms at the same x (within 1e-9) with opposite v.
std::vector<std::pair<std::size_t, std::size_t>> pair_sheets(const OrientedVarifold& varifold,
                                                             double tolerance = 1e-9);

/// Mass-weighted L^2 norm of W(x,v) + W(x,-v) over paired atoms, divided by that of W.
OddnessResult oddness_defect(const OrientedVarifold& varifold, const CurvatureField& w);

struct StructureDefects {
    double symmetry = 0.0;
    double tangency = 0.0;
};

/// Mass-weighted L^2 norms of W - W^T and W v, divided by that of W.
StructureDefects structure_defects(const OrientedVarifold& varifold, const CurvatureField& w);

/// sqrt(sum m |W1 - W2|^2 / sum m |W2|^2).
double relative_l2_error(const OrientedVarifold& varifold, const CurvatureField& w, const CurvatureField& reference);

/// M_i = -(W_rr v_i + W_ri v_r).
Vec mean_from_w(const Mat& w, const Vec& v);

/// (theta1 M(x, xi) + theta2 M(x, -xi)) / (theta1 + theta2).
Vec average_mean_curvature(const Vec& x, const Vec& xi, double theta1, double theta2,
                           const MeanCurvatureField& mean);

struct PointMeanCurvature {
    Vec x;
    Vec h;
    double weight = 0.0;
};

/// Sheet-weighted average of M at every distinct spatial point, using atom masses as weights.
std::vector<PointMeanCurvature> average_mean_curvature(const OrientedVarifold& varifold,
                                                       const MeanCurvatureField& mean);

/// A_ijp = -(W_ip v_j + W_ij v_p).
Tensor3 to_hutchinson(const Mat& w, const Vec& v);
/// W_ia = -P_ad A_idp v_p. Returns W P, i.e. W itself when W v = 0.
Mat from_hutchinson(const Tensor3& a, const Vec& v);

} // namespace varicurv
