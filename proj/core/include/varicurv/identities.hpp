#pragma once

#include "varicurv/curvature_field.hpp"
#include "varicurv/test_function.hpp"
#include "varicurv/types.hpp"
#include "varicurv/varifold.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace varicurv {

/// C^1 vector field with Jacobian J_ij = D_j X_i.
struct VectorField {
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian;
};

/// M(x, v), defined per atom.
using MeanCurvatureField = std::function<Vec(const Vec&, const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

/// Dense rank-3 array with extents d x d x d, d <= 3.
class Tensor3 {
public:
    explicit Tensor3(int d = 3) : d_(d) { data_.fill(0.0); }
    double& operator()(int i, int j, int k) { return data_[static_cast<std::size_t>((i * d_ + j) * d_ + k)]; }
    double operator()(int i, int j, int k) const { return data_[static_cast<std::size_t>((i * d_ + j) * d_ + k)]; }
    int dim() const { return d_; }

private:
    int d_;
    std::array<double, 27> data_{};
};

/// The round unit sphere S^2 in R^3 as ambient manifold.
/// S(x) = I - x x^T, A_ijk = S_ir D_r S_jk = -(S_ij x_k + S_ik x_j),
/// B^k_ij = -S_ij x_k (second fundamental form with outward normal x).
class RoundSphereAmbient {
public:
    static constexpr int kAmbientDim = 3;
    static constexpr double kTolerance = 1e-10;

    Mat tangent_projection(const Vec& x) const;
    Tensor3 curvature_a(const Vec& x) const;
    /// Returned as B(i, j, k) = B^k_ij.
    Tensor3 second_fundamental_form(const Vec& x) const;
    /// Throws OffManifoldError unless |x| = 1 and S(x) v = v within kTolerance.
    void require_on_manifold(const Vec& x, const Vec& v) const;
};

/// sum of mass * P_ij D_j X_i.
double first_variation(const OrientedVarifold& varifold, const VectorField& field);

/// Components i of  sum mass * ((delta_ij - v_i v_j) D_j phi + M_i phi).
/// Requires phi independent of v (PreconditionError otherwise).
Vec lifted_first_variation_residual(const OrientedVarifold& varifold, const MeanCurvatureField& mean,
                                    const TestFunction& phi);

/// Components i of  sum mass * (P_ij D_j phi + W_ia D*_a phi - (W_rr v_i + W_ri v_r) phi).
Vec curvature_identity_residual(const OrientedVarifold& varifold, const CurvatureField& w, const TestFunction& phi);

/// Curvature identity with the mean-curvature slot replaced by g(x) v_i.
Vec prescribed_mc_residual(const OrientedVarifold& varifold, const CurvatureField& w, const ScalarField& g,
                           const TestFunction& phi);

/// Components b of  sum mass * (P_sb D_s phi + W_ba D*_a phi + P_ir B^b_ir phi
///                             - S_rb (W_jr v_k + W_jk v_r) S_kj phi),  P = (I - v v^T) S.
Vec riemannian_identity_residual(const OrientedVarifold& varifold, const CurvatureField& w,
                                 const RoundSphereAmbient& ambient, const TestFunction& phi);

struct ResidualRecord {
    std::string identity;
    int index = 0;
    std::string basis_id;
    double raw = 0.0;
    double normalized = 0.0;
};

/// Residuals of one identity over a whole basis. normalized = raw / (mass(V) * |phi|_C1),
/// where |phi|_C1 is the max over atoms of |phi| + |D phi| + |D* phi| (0/0 reported as 0).
struct ResidualTable {
    std::string identity;
    std::string basis;
    std::vector<ResidualRecord> records;
    double max_raw = 0.0;
    double max_normalized = 0.0;
};

struct EvalOptions {
    int jobs = 1;
    std::string basis_description;
};

ResidualTable lifted_first_variation_residuals(const OrientedVarifold& varifold, const MeanCurvatureField& mean,
                                               const std::vector<TestFunction>& basis, const EvalOptions& options = {});
ResidualTable curvature_identity_residuals(const OrientedVarifold& varifold, const CurvatureField& w,
                                           const std::vector<TestFunction>& basis, const EvalOptions& options = {});
ResidualTable prescribed_mc_residuals(const OrientedVarifold& varifold, const CurvatureField& w, const ScalarField& g,
                                      const std::vector<TestFunction>& basis, const EvalOptions& options = {});
ResidualTable riemannian_identity_residuals(const OrientedVarifold& varifold, const CurvatureField& w,
                                            const RoundSphereAmbient& ambient, const std::vector<TestFunction>& basis,
                                            const EvalOptions& options = {});

/// |phi|_C1 as used for normalization.
double c1_norm_on_atoms(const OrientedVarifold& varifold, const TestFunction& phi);

} // namespace varicurv
