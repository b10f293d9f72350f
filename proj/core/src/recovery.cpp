#include "varicurv/recovery.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace varicurv {

namespace {

/// Orthonormal basis of the complement of a unit vector, as columns.
Mat complement_frame(const Vec& v)
{
    const auto d = v.size();
    Mat e(d, d - 1);
    if (d == 2) {
        e.col(0) << -v(1), v(0);
        return e;
    }
    if (d == 1) {
        return e;
    }
    Eigen::Vector3d n = v.head<3>();
    Eigen::Vector3d seed = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d e1 = (seed - seed.dot(n) * n).normalized();
    e.col(0) = e1;
    e.col(1) = n.cross(e1);
    return e;
}

/// Polar factor of P(v) E_ref: the orthonormal frame of v-perp closest to E_ref.
Mat transported_frame(const Mat& reference, const Vec& v)
{
    const Mat m = normal_projection(v) * reference;
    const Mat gram = m.transpose() * m;
    Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
    if (eig.eigenvalues().minCoeff() < 1e-6) {
        // Normal turned by ~90 degrees inside the patch; any frame of v-perp will do.
        return complement_frame(v);
    }
    const Mat inv_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                         eig.eigenvectors().transpose();
    return m * inv_sqrt;
}

/// Elementary coefficient matrices in frame coordinates [E, v]; index d-1 is the normal slot.
std::vector<Mat> elementary_matrices(int d, const ConstraintFlags& flags)
{
    const int n = d - 1;
    const int col_limit = flags.tangential ? n : d;
    std::vector<Mat> out;
    for (int r = 0; r < col_limit; ++r) {
        for (int c = 0; c < col_limit; ++c) {
            if (flags.symmetric && c < r) {
                continue;
            }
            Mat g = Mat::Zero(d, d);
            if (flags.symmetric) {
                g(r, c) = 1.0;
                g(c, r) = 1.0;
            } else {
                g(r, c) = 1.0;
            }
            out.push_back(g);
        }
        if (flags.tangential && !flags.symmetric) {
            // Rows may use the normal slot; only the normal column is forced to vanish.
            Mat g = Mat::Zero(d, d);
            g(n, r) = 1.0;
            out.push_back(g);
        }
    }
    return out;
}

std::string describe_flags(const ConstraintFlags& f)
{
    std::string s;
    s += f.symmetric ? "symmetric" : "";
    if (f.tangential) {
        s += s.empty() ? "tangential" : "+tangential";
    }
    if (f.odd) {
        s += s.empty() ? "odd" : "+odd";
    }
    return s.empty() ? "unconstrained" : s;
}

std::vector<std::size_t> compact_ids(const std::vector<long long>& raw)
{
    std::map<long long, std::size_t> ids;
    std::vector<std::size_t> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        auto [it, inserted] = ids.emplace(raw[k], ids.size());
        out[k] = it->second;
    }
    return out;
}

double frob2(const Mat& m)
{
    return m.squaredNorm();
}

} // namespace

std::string PatchSpec::describe() const
{
    switch (kind) {
    case Kind::single:
        return "single";
    case Kind::grid:
        return "grid(cells=" + std::to_string(grid_cells) + ")";
    case Kind::per_pair:
        return "per-pair";
    case Kind::kmeans:
        return "kmeans(target=" + std::to_string(atoms_per_patch) + ")";
    }
    return "unknown";
}

std::vector<std::pair<std::size_t, std::size_t>> pair_sheets(const OrientedVarifold& varifold, double tolerance)
{
    const auto& atoms = varifold.atoms();
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms[a].x(0) < atoms[b].x(0); });
    std::vector<std::size_t> partner(atoms.size(), std::numeric_limits<std::size_t>::max());
    const auto none = std::numeric_limits<std::size_t>::max();
    // Process atoms by index so the matching is independent of the sort's tie handling.
    std::vector<std::size_t> position(atoms.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        position[order[p]] = p;
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (partner[i] != none) {
            continue;
        }
        const Atom& a = atoms[i];
        std::size_t best = none;
        const std::size_t p = position[i];
        auto consider = [&](std::size_t q) {
            const std::size_t j = order[q];
            if (j == i || partner[j] != none) {
                return;
            }
            const Atom& b = atoms[j];
            if ((a.x - b.x).norm() <= tolerance && (a.v + b.v).norm() <= 1e-9 && (best == none || j < best)) {
                best = j;
            }
        };
        for (std::size_t q = p + 1; q < order.size() && atoms[order[q]].x(0) - a.x(0) <= tolerance; ++q) {
            consider(q);
        }
        for (std::size_t q = p; q-- > 0 && a.x(0) - atoms[order[q]].x(0) <= tolerance;) {
            consider(q);
        }
        if (best != none) {
            partner[i] = best;
            partner[best] = i;
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (partner[i] != none && i < partner[i]) {
            pairs.emplace_back(i, partner[i]);
        }
    }
    return pairs;
}

std::vector<std::size_t> assign_patches(const OrientedVarifold& varifold, const PatchSpec& spec)
{
    const auto& atoms = varifold.atoms();
    const std::size_t n = atoms.size();
    if (n == 0) {
        return {};
    }
    const int d = varifold.ambient_dim();
    switch (spec.kind) {
    case PatchSpec::Kind::single:
        return std::vector<std::size_t>(n, 0);
    case PatchSpec::Kind::per_pair: {
        std::vector<long long> raw(n);
        for (std::size_t k = 0; k < n; ++k) {
            raw[k] = static_cast<long long>(k);
        }
        for (const auto& [i, j] : pair_sheets(varifold)) {
            raw[j] = raw[i];
        }
        return compact_ids(raw);
    }
    case PatchSpec::Kind::grid: {
        if (spec.grid_cells < 1) {
            throw PreconditionError("patch grid needs at least one cell per axis");
        }
        Vec lo = atoms.front().x;
        Vec hi = lo;
        for (const auto& a : atoms) {
            lo = lo.cwiseMin(a.x);
            hi = hi.cwiseMax(a.x);
        }
        const Vec center = 0.5 * (lo + hi);
        double half = 0.5 * (hi - lo).maxCoeff();
        if (!(half > 0.0)) {
            half = 1.0;
        }
        const int g = spec.grid_cells;
        const double cell = 2.0 * half / g;
        std::vector<long long> raw(n);
        for (std::size_t k = 0; k < n; ++k) {
            long long key = 0;
            for (int a = 0; a < d; ++a) {
                const double t = (atoms[k].x(a) - (center(a) - half)) / cell;
                const int idx = std::clamp(static_cast<int>(std::floor(t)), 0, g - 1);
                key = key * g + idx;
            }
            raw[k] = key;
        }
        return compact_ids(raw);
    }
    case PatchSpec::Kind::kmeans: {
        if (spec.atoms_per_patch < 1) {
            throw PreconditionError("kmeans patches need a positive target size");
        }
        const std::size_t k_count = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(n) / spec.atoms_per_patch)));
        // Farthest-point seeding from atom 0, then Lloyd iterations; fully deterministic.
        std::vector<Vec> centers{atoms.front().x};
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        while (centers.size() < k_count) {
            std::size_t far = 0;
            for (std::size_t k = 0; k < n; ++k) {
                dist[k] = std::min(dist[k], (atoms[k].x - centers.back()).squaredNorm());
                if (dist[k] > dist[far]) {
                    far = k;
                }
            }
            if (dist[far] == 0.0) {
                break;
            }
            centers.push_back(atoms[far].x);
        }
        std::vector<long long> raw(n, 0);
        for (int iter = 0; iter < 25; ++iter) {
            bool changed = false;
            for (std::size_t k = 0; k < n; ++k) {
                long long best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < centers.size(); ++c) {
                    const double dd = (atoms[k].x - centers[c]).squaredNorm();
                    if (dd < best_d) {
                        best_d = dd;
                        best = static_cast<long long>(c);
                    }
                }
                changed = changed || raw[k] != best;
                raw[k] = best;
            }
            if (!changed && iter > 0) {
                break;
            }
            std::vector<Vec> sums(centers.size(), Vec::Zero(d));
            std::vector<std::size_t> counts(centers.size(), 0);
            for (std::size_t k = 0; k < n; ++k) {
                sums[static_cast<std::size_t>(raw[k])] += atoms[k].x;
                ++counts[static_cast<std::size_t>(raw[k])];
            }
            for (std::size_t c = 0; c < centers.size(); ++c) {
                if (counts[c] > 0) {
                    centers[c] = sums[c] / static_cast<double>(counts[c]);
                }
            }
        }
        return compact_ids(raw);
    }
    }
    throw PreconditionError("unknown patch kind");
}

Recovery recover_curvature(const OrientedVarifold& varifold, const std::vector<TestFunction>& basis,
                           const RecoveryOptions& options)
{
    const int d = varifold.ambient_dim();
    if (varifold.dim() != d - 1) {
        throw PreconditionError("curvature recovery needs a codimension-one varifold");
    }
    if (options.lambda && !(*options.lambda >= 0.0)) {
        throw PreconditionError("Tikhonov weight must be nonnegative");
    }
    const auto& atoms = varifold.atoms();
    const std::size_t n_atoms = atoms.size();
    const ConstraintFlags& flags = options.constraints;

    // Patches, sheets, parameter groups.
    const std::vector<std::size_t> patch = assign_patches(varifold, options.patches);
    const std::size_t n_patches = patch.empty() ? 0 : *std::max_element(patch.begin(), patch.end()) + 1;
    std::vector<std::size_t> rep(n_patches, std::numeric_limits<std::size_t>::max());
    for (std::size_t k = 0; k < n_atoms; ++k) {
        rep[patch[k]] = std::min(rep[patch[k]], k);
    }
    std::vector<Mat> rep_frame(n_patches);
    for (std::size_t p = 0; p < n_patches; ++p) {
        rep_frame[p] = complement_frame(atoms[rep[p]].v);
    }
    std::vector<double> sigma(n_atoms);
    std::vector<long long> group_key(n_atoms);
    for (std::size_t k = 0; k < n_atoms; ++k) {
        sigma[k] = atoms[k].v.dot(atoms[rep[patch[k]]].v) >= 0.0 ? 1.0 : -1.0;
        const long long sheet = (flags.odd || sigma[k] > 0.0) ? 0 : 1;
        group_key[k] = static_cast<long long>(patch[k]) * 2 + sheet;
    }
    const std::vector<std::size_t> group = compact_ids(group_key);
    const std::size_t n_groups = group.empty() ? 0 : *std::max_element(group.begin(), group.end()) + 1;

    const std::vector<Mat> elementary = elementary_matrices(d, flags);
    const std::size_t nq = elementary.size();
    const std::size_t unknowns = n_groups * nq;
    const std::size_t equations = basis.size() * static_cast<std::size_t>(d);
    if (equations < unknowns) {
        std::ostringstream msg;
        msg << "underdetermined recovery: " << equations << " equations for " << unknowns << " unknowns";
        throw UnderdeterminedError(msg.str());
    }

    // Per-atom images of the elementary matrices: B = sigma R G R^T and its mean slot u.
    std::vector<Mat> frame(n_atoms);
    std::vector<Mat> b_mat(n_atoms * nq);
    std::vector<Vec> u_vec(n_atoms * nq);
    for (std::size_t k = 0; k < n_atoms; ++k) {
        const Vec aligned = sigma[k] * atoms[k].v;
        Mat r(d, d);
        r.leftCols(d - 1) = transported_frame(rep_frame[patch[k]], aligned);
        r.col(d - 1) = aligned;
        frame[k] = r;
        for (std::size_t q = 0; q < nq; ++q) {
            const Mat bq = sigma[k] * (r * elementary[q] * r.transpose());
            b_mat[k * nq + q] = bq;
            u_vec[k * nq + q] = mean_from_w(bq, atoms[k].v);
        }
    }

    // Dense system A c = -b, one row per (test function, component).
    Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(equations),
                                                  static_cast<Eigen::Index>(unknowns));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(equations));
    const auto assemble = [&](std::size_t f) {
        const TestFunction& phi = basis[f];
        const auto row0 = static_cast<Eigen::Index>(f * static_cast<std::size_t>(d));
        for (std::size_t k = 0; k < n_atoms; ++k) {
            const Atom& at = atoms[k];
            if (phi.outside_support(at.x)) {
                continue;
            }
            const TestFunction::Evaluation e = phi.evaluate(at.x, at.v);
            rhs.segment(row0, d) += at.mass * (normal_projection(at.v) * e.grad_x);
            const auto col0 = static_cast<Eigen::Index>(group[k] * nq);
            for (std::size_t q = 0; q < nq; ++q) {
                const Vec term = b_mat[k * nq + q] * e.grad_v + u_vec[k * nq + q] * e.value;
                a_mat.block(row0, col0 + static_cast<Eigen::Index>(q), d, 1) += at.mass * term;
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(basis.size())));
    if (jobs <= 1) {
        for (std::size_t f = 0; f < basis.size(); ++f) {
            assemble(f);
        }
    } else {
        std::vector<std::thread> workers;
        for (int t = 0; t < jobs; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t f = static_cast<std::size_t>(t); f < basis.size(); f += static_cast<std::size_t>(jobs)) {
                    assemble(f);
                }
            });
        }
        for (auto& w : workers) {
            w.join();
        }
    }
    if (!a_mat.allFinite() || !rhs.allFinite()) {
        throw SolverFailureError("non-finite entries in the recovery system");
    }

    RecoveryReport report;
    report.equations = equations;
    report.unknowns = unknowns;
    report.basis = options.basis_description;
    report.patches = options.patches.describe();
    report.mode = describe_flags(flags);

    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns));
    if (unknowns > 0) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a_mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd s = svd.singularValues();
        const double max_diag = a_mat.colwise().squaredNorm().maxCoeff();
        const double lambda = options.lambda ? *options.lambda : options.relative_lambda * max_diag;
        const double smax2 = s.size() > 0 ? s(0) * s(0) : 0.0;
        report.lambda = lambda;
        report.rank = 0;
        report.min_relative_eigenvalue = smax2 > 0.0 ? (s(s.size() - 1) * s(s.size() - 1)) / smax2 : 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (smax2 > 0.0 && s(i) * s(i) > options.rank_tolerance * smax2) {
                ++report.rank;
            }
        }
        report.ill_posed = report.rank < unknowns;
        const Eigen::VectorXd utb = svd.matrixU().transpose() * (-rhs);
        Eigen::VectorXd scaled(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (lambda > 0.0) {
                scaled(i) = s(i) / (s(i) * s(i) + lambda) * utb(i);
            } else {
                // Minimum-norm pseudo-inverse on the numerically nonzero spectrum.
                const bool keep = smax2 > 0.0 && s(i) * s(i) > options.rank_tolerance * smax2;
                scaled(i) = keep ? utb(i) / s(i) : 0.0;
            }
        }
        coeffs = svd.matrixV() * scaled;
        if (!coeffs.allFinite()) {
            throw SolverFailureError("non-finite recovery solution");
        }
    }
    const Eigen::VectorXd residual = a_mat * coeffs + rhs;
    report.residual_norm = residual.norm();
    const double rhs_norm = rhs.norm();
    report.relative_residual = rhs_norm > 0.0 ? report.residual_norm / rhs_norm : report.residual_norm;

    // Per-atom W and the field layout: one patch entry per parameter group.
    CurvatureField field;
    field.flags = flags;
    field.per_atom.resize(n_atoms);
    field.patch_of_atom = group;
    field.per_patch.assign(n_groups, Mat::Zero(d, d));
    field.patch_representative.assign(n_groups, std::numeric_limits<std::size_t>::max());
    for (std::size_t k = 0; k < n_atoms; ++k) {
        Mat w = Mat::Zero(d, d);
        for (std::size_t q = 0; q < nq; ++q) {
            w += coeffs(static_cast<Eigen::Index>(group[k] * nq + q)) * b_mat[k * nq + q];
        }
        field.per_atom[k] = w;
        if (field.patch_representative[group[k]] == std::numeric_limits<std::size_t>::max()) {
            field.patch_representative[group[k]] = k;
            field.per_patch[group[k]] = w;
        }
    }

    const StructureDefects defects = structure_defects(varifold, field);
    report.symmetry_defect = defects.symmetry;
    report.tangency_defect = defects.tangency;
    const OddnessResult odd = oddness_defect(varifold, field);
    report.oddness_defect = odd.defect;
    report.no_pairs = odd.no_pairs;
    CompensatedSum l1;
    CompensatedSum l2;
    for (std::size_t k = 0; k < n_atoms; ++k) {
        const double norm = field.per_atom[k].norm();
        l1.add(atoms[k].mass * norm);
        l2.add(atoms[k].mass * norm * norm);
    }
    report.l1_norm = l1.value();
    report.l2_norm = std::sqrt(std::max(0.0, l2.value()));
    return Recovery{std::move(field), std::move(report)};
}

OddnessResult oddness_defect(const OrientedVarifold& varifold, const CurvatureField& w)
{
    if (w.per_atom.size() != varifold.size()) {
        throw PreconditionError("curvature field does not match the varifold atom count");
    }
    const auto pairs = pair_sheets(varifold);
    OddnessResult out;
    out.pairs = pairs.size();
    if (pairs.empty()) {
        out.no_pairs = true;
        return out;
    }
    const auto& atoms = varifold.atoms();
    CompensatedSum num;
    CompensatedSum den;
    for (const auto& [i, j] : pairs) {
        const double mi = atoms[i].mass;
        const double mj = atoms[j].mass;
        num.add(0.5 * (mi + mj) * frob2(w.per_atom[i] + w.per_atom[j]));
        den.add(0.5 * (mi * frob2(w.per_atom[i]) + mj * frob2(w.per_atom[j])));
    }
    out.defect = den.value() > 0.0 ? std::sqrt(num.value() / den.value()) : 0.0;
    return out;
}

StructureDefects structure_defects(const OrientedVarifold& varifold, const CurvatureField& w)
{
    if (w.per_atom.size() != varifold.size()) {
        throw PreconditionError("curvature field does not match the varifold atom count");
    }
    CompensatedSum sym;
    CompensatedSum tan;
    CompensatedSum norm;
    const auto& atoms = varifold.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const Mat& wk = w.per_atom[k];
        sym.add(atoms[k].mass * frob2(wk - wk.transpose()));
        tan.add(atoms[k].mass * (wk * atoms[k].v).squaredNorm());
        norm.add(atoms[k].mass * frob2(wk));
    }
    StructureDefects out;
    if (norm.value() > 0.0) {
        out.symmetry = std::sqrt(sym.value() / norm.value());
        out.tangency = std::sqrt(tan.value() / norm.value());
    }
    return out;
}

double relative_l2_error(const OrientedVarifold& varifold, const CurvatureField& w, const CurvatureField& reference)
{
    if (w.per_atom.size() != varifold.size() || reference.per_atom.size() != varifold.size()) {
        throw PreconditionError("curvature field does not match the varifold atom count");
    }
    CompensatedSum num;
    CompensatedSum den;
    const auto& atoms = varifold.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        num.add(atoms[k].mass * frob2(w.per_atom[k] - reference.per_atom[k]));
        den.add(atoms[k].mass * frob2(reference.per_atom[k]));
    }
    if (!(den.value() > 0.0)) {
        return std::sqrt(num.value());
    }
    return std::sqrt(num.value() / den.value());
}

Vec mean_from_w(const Mat& w, const Vec& v)
{
    return -(w.trace() * v + w.transpose() * v);
}

Vec average_mean_curvature(const Vec& x, const Vec& xi, double theta1, double theta2, const MeanCurvatureField& mean)
{
    if (theta1 < 0.0 || theta2 < 0.0) {
        throw PreconditionError("multiplicities must be nonnegative");
    }
    if (theta1 + theta2 == 0.0) {
        throw ZeroMultiplicityError("total multiplicity is zero");
    }
    Vec h = Vec::Zero(x.size());
    if (theta1 > 0.0) {
        h += theta1 * mean(x, xi);
    }
    if (theta2 > 0.0) {
        h += theta2 * mean(x, Vec(-xi));
    }
    return h / (theta1 + theta2);
}

std::vector<PointMeanCurvature> average_mean_curvature(const OrientedVarifold& varifold,
                                                       const MeanCurvatureField& mean)
{
    const auto& atoms = varifold.atoms();
    std::vector<std::size_t> partner(atoms.size(), std::numeric_limits<std::size_t>::max());
    for (const auto& [i, j] : pair_sheets(varifold)) {
        partner[i] = j;
        partner[j] = i;
    }
    std::vector<PointMeanCurvature> out;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const std::size_t j = partner[k];
        if (j != std::numeric_limits<std::size_t>::max() && j < k) {
            continue;
        }
        const Atom& a = atoms[k];
        const double m2 = j == std::numeric_limits<std::size_t>::max() ? 0.0 : atoms[j].mass;
        if (a.mass + m2 == 0.0) {
            throw ZeroMultiplicityError("zero total mass at a point");
        }
        out.push_back(PointMeanCurvature{a.x, average_mean_curvature(a.x, a.v, a.mass, m2, mean), a.mass + m2});
    }
    return out;
}

Tensor3 to_hutchinson(const Mat& w, const Vec& v)
{
    const int d = static_cast<int>(v.size());
    Tensor3 a(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (int p = 0; p < d; ++p) {
                a(i, j, p) = -(w(i, p) * v(j) + w(i, j) * v(p));
            }
        }
    }
    return a;
}

Mat from_hutchinson(const Tensor3& a, const Vec& v)
{
    const int d = static_cast<int>(v.size());
    const Mat p = normal_projection(v);
    Mat w = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int ai = 0; ai < d; ++ai) {
            double sum = 0.0;
            for (int dd = 0; dd < d; ++dd) {
                double inner = 0.0;
                for (int q = 0; q < d; ++q) {
                    inner += a(i, dd, q) * v(q);
                }
                sum += p(ai, dd) * inner;
            }
            w(i, ai) = -sum;
        }
    }
    return w;
}

} // namespace varicurv
