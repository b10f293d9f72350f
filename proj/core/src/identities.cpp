#include "varicurv/identities.hpp"

#include "varicurv/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace varicurv {

namespace {

struct Accumulated {
    Vec value;
    double c1_norm = 0.0;
};

/// Sums mass * kernel(atom, evaluation) in atom order; atoms outside the x-support contribute nothing.
template <class Kernel>
Accumulated accumulate(const OrientedVarifold& varifold, const TestFunction& phi, int components, Kernel&& kernel)
{
    std::vector<CompensatedSum> sums(static_cast<std::size_t>(components));
    double c1 = 0.0;
    const auto& atoms = varifold.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const Atom& a = atoms[k];
        if (phi.outside_support(a.x)) {
            continue;
        }
        const TestFunction::Evaluation e = phi.evaluate(a.x, a.v);
        c1 = std::max(c1, std::abs(e.value) + e.grad_x.norm() + e.grad_v.norm());
        const Vec term = kernel(k, a, e);
        for (int i = 0; i < components; ++i) {
            sums[static_cast<std::size_t>(i)].add(a.mass * term(i));
        }
    }
    Accumulated out{Vec(components), c1};
    for (int i = 0; i < components; ++i) {
        out.value(i) = sums[static_cast<std::size_t>(i)].value();
    }
    return out;
}

void require_field(const OrientedVarifold& varifold, const CurvatureField& w)
{
    if (w.per_atom.size() != varifold.size()) {
        throw PreconditionError("curvature field does not match the varifold atom count");
    }
}

Vec lifted_integrand(const Atom& a, const TestFunction::Evaluation& e, const Vec& mean)
{
    return normal_projection(a.v) * e.grad_x + mean * e.value;
}

// Shares the floating-point path with the lifted first variation when grad_v = 0.
Vec curvature_integrand(const Atom& a, const Mat& w, const TestFunction::Evaluation& e, const Vec& mean)
{
    Vec term = lifted_integrand(a, e, mean);
    term += w * e.grad_v;
    return term;
}

/// Evaluates `one(phi)` over the basis, optionally on several threads, and tabulates
/// records in basis order so the table is independent of the job count.
template <class One>
ResidualTable tabulate(const std::string& identity, const OrientedVarifold& varifold,
                       const std::vector<TestFunction>& basis, const EvalOptions& options, One&& one)
{
    std::vector<Accumulated> results(basis.size());
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(basis.size())));
    if (jobs <= 1) {
        for (std::size_t k = 0; k < basis.size(); ++k) {
            results[k] = one(basis[k]);
        }
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) {
            workers.emplace_back([&, t] {
                try {
                    for (std::size_t k = static_cast<std::size_t>(t); k < basis.size();
                         k += static_cast<std::size_t>(jobs)) {
                        results[k] = one(basis[k]);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) {
            w.join();
        }
        for (const auto& err : errors) {
            if (err) {
                std::rethrow_exception(err);
            }
        }
    }

    ResidualTable table;
    table.identity = identity;
    table.basis = options.basis_description;
    const double mass = varifold.mass();
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Accumulated& r = results[k];
        const double scale = mass * r.c1_norm;
        for (Eigen::Index i = 0; i < r.value.size(); ++i) {
            ResidualRecord rec;
            rec.identity = identity;
            rec.index = static_cast<int>(i) + 1;
            rec.basis_id = basis[k].id().empty() ? std::to_string(k) : basis[k].id();
            rec.raw = r.value(i);
            rec.normalized = scale > 0.0 ? rec.raw / scale : 0.0;
            table.max_raw = std::max(table.max_raw, std::abs(rec.raw));
            table.max_normalized = std::max(table.max_normalized, std::abs(rec.normalized));
            table.records.push_back(std::move(rec));
        }
    }
    return table;
}

Accumulated lifted_impl(const OrientedVarifold& varifold, const MeanCurvatureField& mean, const TestFunction& phi)
{
    if (!phi.v_independent()) {
        throw PreconditionError("lifted first variation needs a test function independent of v");
    }
    const int d = varifold.ambient_dim();
    return accumulate(varifold, phi, d, [&](std::size_t, const Atom& a, const TestFunction::Evaluation& e) {
        return lifted_integrand(a, e, mean(a.x, a.v));
    });
}

Accumulated curvature_impl(const OrientedVarifold& varifold, const CurvatureField& w, const TestFunction& phi)
{
    require_field(varifold, w);
    const int d = varifold.ambient_dim();
    return accumulate(varifold, phi, d, [&](std::size_t k, const Atom& a, const TestFunction::Evaluation& e) {
        const Mat& wk = w.per_atom[k];
        return curvature_integrand(a, wk, e, mean_from_w(wk, a.v));
    });
}

Accumulated prescribed_impl(const OrientedVarifold& varifold, const CurvatureField& w, const ScalarField& g,
                            const TestFunction& phi)
{
    require_field(varifold, w);
    const int d = varifold.ambient_dim();
    return accumulate(varifold, phi, d, [&](std::size_t k, const Atom& a, const TestFunction::Evaluation& e) {
        return curvature_integrand(a, w.per_atom[k], e, Vec(g(a.x) * a.v));
    });
}

Accumulated riemannian_impl(const OrientedVarifold& varifold, const CurvatureField& w,
                            const RoundSphereAmbient& ambient, const TestFunction& phi)
{
    require_field(varifold, w);
    if (varifold.ambient_dim() != RoundSphereAmbient::kAmbientDim) {
        throw OffManifoldError("the round sphere ambient needs points in R^3");
    }
    for (const auto& a : varifold.atoms()) {
        ambient.require_on_manifold(a.x, a.v);
    }
    return accumulate(varifold, phi, 3, [&](std::size_t k, const Atom& a, const TestFunction::Evaluation& e) {
        const Mat& wk = w.per_atom[k];
        const Mat s = ambient.tangent_projection(a.x);
        const Mat p = normal_projection(a.v) * s;
        const Tensor3 b = ambient.second_fundamental_form(a.x);
        Vec term = p.transpose() * e.grad_x + wk * e.grad_v;
        for (int c = 0; c < 3; ++c) {
            double pb = 0.0;
            for (int i = 0; i < 3; ++i) {
                for (int r = 0; r < 3; ++r) {
                    pb += p(i, r) * b(i, r, c);
                }
            }
            term(c) += pb * e.value;
        }
        const Vec sv = s * a.v;
        const Vec inner = wk.transpose() * sv + (wk * s).trace() * a.v;
        term -= (s * inner) * e.value;
        return term;
    });
}

} // namespace

Mat RoundSphereAmbient::tangent_projection(const Vec& x) const
{
    return normal_projection(x);
}

Tensor3 RoundSphereAmbient::curvature_a(const Vec& x) const
{
    const Mat s = tangent_projection(x);
    Tensor3 a(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                a(i, j, k) = -(s(i, j) * x(k) + s(i, k) * x(j));
            }
        }
    }
    return a;
}

Tensor3 RoundSphereAmbient::second_fundamental_form(const Vec& x) const
{
    const Mat s = tangent_projection(x);
    Tensor3 b(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                b(i, j, k) = -s(i, j) * x(k);
            }
        }
    }
    return b;
}

void RoundSphereAmbient::require_on_manifold(const Vec& x, const Vec& v) const
{
    if (x.size() != kAmbientDim || v.size() != kAmbientDim) {
        throw OffManifoldError("round sphere ambient expects points in R^3");
    }
    const double radial = std::abs(x.norm() - 1.0);
    const double tangential = (tangent_projection(x) * v - v).norm();
    if (radial > kTolerance || tangential > kTolerance) {
        std::ostringstream msg;
        msg << "atom off the round sphere: ||x| - 1| = " << radial << ", |S v - v| = " << tangential;
        throw OffManifoldError(msg.str());
    }
}

double first_variation(const OrientedVarifold& varifold, const VectorField& field)
{
    return integrate(varifold, [&](const Vec& x, const Vec& v) {
               const Mat jac = field.jacobian(x);
               return (normal_projection(v).cwiseProduct(jac)).sum();
           })
        .value;
}

Vec lifted_first_variation_residual(const OrientedVarifold& varifold, const MeanCurvatureField& mean,
                                    const TestFunction& phi)
{
    return lifted_impl(varifold, mean, phi).value;
}

Vec curvature_identity_residual(const OrientedVarifold& varifold, const CurvatureField& w, const TestFunction& phi)
{
    return curvature_impl(varifold, w, phi).value;
}

Vec prescribed_mc_residual(const OrientedVarifold& varifold, const CurvatureField& w, const ScalarField& g,
                           const TestFunction& phi)
{
    return prescribed_impl(varifold, w, g, phi).value;
}

Vec riemannian_identity_residual(const OrientedVarifold& varifold, const CurvatureField& w,
                                 const RoundSphereAmbient& ambient, const TestFunction& phi)
{
    return riemannian_impl(varifold, w, ambient, phi).value;
}

ResidualTable lifted_first_variation_residuals(const OrientedVarifold& varifold, const MeanCurvatureField& mean,
                                               const std::vector<TestFunction>& basis, const EvalOptions& options)
{
    return tabulate("lifted_first_variation", varifold, basis, options,
                    [&](const TestFunction& phi) { return lifted_impl(varifold, mean, phi); });
}

ResidualTable curvature_identity_residuals(const OrientedVarifold& varifold, const CurvatureField& w,
                                           const std::vector<TestFunction>& basis, const EvalOptions& options)
{
    require_field(varifold, w);
    return tabulate("curvature_identity", varifold, basis, options,
                    [&](const TestFunction& phi) { return curvature_impl(varifold, w, phi); });
}

ResidualTable prescribed_mc_residuals(const OrientedVarifold& varifold, const CurvatureField& w, const ScalarField& g,
                                      const std::vector<TestFunction>& basis, const EvalOptions& options)
{
    require_field(varifold, w);
    return tabulate("prescribed_mean_curvature", varifold, basis, options,
                    [&](const TestFunction& phi) { return prescribed_impl(varifold, w, g, phi); });
}

ResidualTable riemannian_identity_residuals(const OrientedVarifold& varifold, const CurvatureField& w,
                                            const RoundSphereAmbient& ambient, const std::vector<TestFunction>& basis,
                                            const EvalOptions& options)
{
    require_field(varifold, w);
    return tabulate("riemannian_identity", varifold, basis, options,
                    [&](const TestFunction& phi) { return riemannian_impl(varifold, w, ambient, phi); });
}

double c1_norm_on_atoms(const OrientedVarifold& varifold, const TestFunction& phi)
{
    return accumulate(varifold, phi, 1, [](std::size_t, const Atom&, const TestFunction::Evaluation&) {
               return Vec(Vec::Zero(1));
           })
        .c1_norm;
}

} // namespace varicurv
