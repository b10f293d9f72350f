#pragma once

#include "varicurv/geometry.hpp"
#include "varicurv/recovery.hpp"
#include "varicurv/test_function.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace varicurv {

/// g(x) = constant + linear . x
struct ScalarPolynomial {
    double constant = 0.0;
    std::vector<double> linear;

    double operator()(const Vec& x) const;
    std::string describe() const;
};

struct ScenarioSpec {
    std::string id; ///< double-plane | translated-spheres | sphere-verification | latitude-circles
    std::vector<int> resolutions;
    std::vector<double> ells;
    std::vector<double> radii;
    std::vector<double> polar_angles;
    ScalarPolynomial g;
    int quadrature_order = 1;
    BasisConfig basis;
    /// Resolution used for curvature recovery runs (0 = finest of `resolutions`).
    int recovery_resolution = 0;
    int recovery_grid_cells = 3;
    double disc_radius = 1.0;
    /// Relative jitter of basis centers (in grid spacings); the seed only drives this jitter.
    double basis_jitter = 0.0;
    unsigned seed = 0;
    int jobs = 1;

    /// Throws PreconditionError on non-increasing schedules or out-of-range parameters.
    void validate() const;
};

/// Defaults reproducing the built-in experiments.
ScenarioSpec default_scenario_spec(const std::string& id);
std::vector<std::string> scenario_ids();

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Verdict {
    std::string criterion;
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison; ///< "<=", ">=", "in", "==" ...
    bool pass = false;
};

struct ScenarioReport {
    std::string id;
    std::string spec_json;
    std::string spec_hash;
    std::vector<Table> tables;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;

    bool passed() const;
    const Table* table(const std::string& name) const;
};

ScenarioReport scenario_double_plane(const ScenarioSpec& spec);
ScenarioReport scenario_translated_spheres(const ScenarioSpec& spec);
ScenarioReport scenario_sphere_verification(const ScenarioSpec& spec);
ScenarioReport scenario_latitude_circles(const ScenarioSpec& spec);
ScenarioReport run_scenario(const ScenarioSpec& spec);

/// Ad-hoc identity check on one surface over a resolution schedule.
struct VerifySpec {
    Hypersurface surface = Hypersurface::sphere(Vec::Zero(3), 1.0, -1);
    std::vector<int> resolutions{16, 32, 64};
    int quadrature_order = 1;
    std::optional<ScalarPolynomial> g;
    std::optional<BasisConfig> basis;
    double order_threshold = 1.5;
    double residual_threshold = 1e-3;
    int jobs = 1;
};

ScenarioReport verify_surface(const VerifySpec& spec);

/// Places the basis cube well inside the boundary of open surfaces (planes, graphs)
/// unless a cube is already set. Sphere zones have no safe default and throw.
BasisConfig interior_basis(const Hypersurface& surface, BasisConfig config);

/// Canonical JSON for the spec; the hash is FNV-1a 64 of this string.
std::string scenario_spec_json(const ScenarioSpec& spec);
std::string fnv1a_hex(const std::string& text);

/// JSON report; the timestamp field is omitted when `timestamp` is empty.
std::string report_json(const ScenarioReport& report, const std::string& timestamp = {});
std::string table_csv(const Table& table);
/// Writes <id>-<hash>.json and <id>-<hash>-<table>.csv; returns the written paths.
std::vector<std::filesystem::path> write_report(const ScenarioReport& report, const std::filesystem::path& dir,
                                                const std::string& timestamp = {});

/// Basis jitter helper: each bump center moves by a uniform offset of at most
/// `jitter` times its radius in every coordinate.
std::vector<TestFunction> jitter_basis(const std::vector<TestFunction>& basis, double jitter, unsigned seed);

} // namespace varicurv
