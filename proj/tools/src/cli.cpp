#include "varicurv_cli/cli.hpp"

#include "varicurv/curvature_field.hpp"
#include "varicurv/geometry.hpp"
#include "varicurv/mesh_io.hpp"
#include "varicurv/recovery.hpp"
#include "varicurv/scenarios.hpp"
#include "varicurv/varifold.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace varicurv::cli {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { text, integer, real, int_list, real_list, flag };

struct OptionDef {
    std::string key;
    Kind kind;
    std::string help;
};

const std::vector<OptionDef> kCommon = {
    {"out", Kind::text, "output directory (env " + std::string(kOutputEnv) + " overrides)"},
    {"no_timestamp", Kind::flag, "omit the timestamp field from JSON reports"},
    {"jobs", Kind::integer, "worker threads for parallel-safe reductions"},
};

const std::vector<OptionDef> kSurface = {
    {"surface", Kind::text, "sphere | circle | plane | torus | graph | mesh"},
    {"dim", Kind::integer, "ambient dimension for spheres and planes (2 or 3)"},
    {"radius", Kind::real, "radius (sphere, circle, plane disc, graph disc)"},
    {"center", Kind::real_list, "center coordinates, comma separated"},
    {"normal", Kind::real_list, "plane normal, comma separated"},
    {"major_radius", Kind::real, "torus major radius"},
    {"minor_radius", Kind::real, "torus minor radius"},
    {"k1", Kind::real, "graph principal curvature along x1"},
    {"k2", Kind::real, "graph principal curvature along x2"},
    {"orientation", Kind::text, "inner | outer | +1 | -1 (spheres default to inner)"},
    {"mesh", Kind::text, "OFF mesh path (surface = mesh)"},
};

const std::vector<OptionDef> kBasis = {
    {"grid", Kind::integer, "basis bump centers per axis"},
    {"rho_factor", Kind::real, "bump radius in grid spacings"},
    {"v_degree", Kind::integer, "max degree of v-monomials (0..2)"},
    {"x_degree", Kind::integer, "max degree of x-polynomials (0..2)"},
};

std::vector<OptionDef> options_for(const std::string& command)
{
    std::vector<OptionDef> defs = kCommon;
    const auto add = [&defs](const std::vector<OptionDef>& more) { defs.insert(defs.end(), more.begin(), more.end()); };
    if (command == "verify") {
        add(kSurface);
        add(kBasis);
        add({{"g", Kind::real, "constant prescribed mean curvature"},
             {"resolutions", Kind::int_list, "resolution schedule, strictly increasing"},
             {"order", Kind::integer, "quadrature order (1 or 2)"},
             {"order_threshold", Kind::real, "minimum observed convergence order"},
             {"residual_threshold", Kind::real, "maximum finest normalized residual"}});
    } else if (command == "recover") {
        add(kSurface);
        add(kBasis);
        add({{"varifold", Kind::text, "atom CSV (instead of sampling a surface)"},
             {"theta1", Kind::integer, "multiplicity on the oriented sheet"},
             {"theta2", Kind::integer, "multiplicity on the opposite sheet"},
             {"resolution", Kind::integer, "sampling resolution"},
             {"order", Kind::integer, "quadrature order (1 or 2)"},
             {"basis", Kind::text, "default | v-independent"},
             {"constraints", Kind::text, "comma list of symmetric,tangential,odd or 'none'"},
             {"patches", Kind::text, "grid | single | per-pair | kmeans (default grid on spheres, circles and planes, else kmeans)"},
             {"grid_cells", Kind::integer, "patch cells per axis (grid patches)"},
             {"atoms_per_patch", Kind::integer, "target patch size (kmeans patches)"},
             {"lambda", Kind::real, "absolute Tikhonov weight"},
             {"relative_lambda", Kind::real, "Tikhonov weight relative to the largest normal-matrix diagonal"},
             {"recovery_threshold", Kind::real, "max relative error against a known surface"}});
    } else if (command == "scenario") {
        add(kBasis);
        add({{"resolutions", Kind::int_list, "resolution schedule, strictly increasing"},
             {"ells", Kind::real_list, "translation parameters, strictly increasing"},
             {"radii", Kind::real_list, "sphere radii"},
             {"polar_angles", Kind::real_list, "latitude polar angles in radians"},
             {"g", Kind::real, "constant g"},
             {"order", Kind::integer, "quadrature order (1 or 2)"},
             {"recovery_resolution", Kind::integer, "resolution for recovery runs (0 = finest)"},
             {"recovery_grid_cells", Kind::integer, "patch cells per axis for recovery"},
             {"disc_radius", Kind::real, "double-plane disc radius"},
             {"jitter", Kind::real, "basis center jitter in bump radii"},
             {"seed", Kind::integer, "seed for basis jitter"}});
    } else if (command == "distance") {
        add({{"first", Kind::text, "first atom CSV"},
             {"second", Kind::text, "second atom CSV"},
             {"dictionary_grid", Kind::integer, "dictionary centers per axis"},
             {"dictionary_radii", Kind::real_list, "bump radii in units of the bounding half-width"}});
    }
    return defs;
}

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

json convert(const OptionDef& def, const std::string& raw)
{
    try {
        std::size_t used = 0;
        switch (def.kind) {
        case Kind::text:
            return raw;
        case Kind::integer: {
            const long long v = std::stoll(raw, &used);
            if (used != raw.size()) {
                break;
            }
            return v;
        }
        case Kind::real: {
            const double v = std::stod(raw, &used);
            if (used != raw.size()) {
                break;
            }
            return v;
        }
        case Kind::int_list: {
            json arr = json::array();
            for (const auto& item : split(raw)) {
                arr.push_back(std::stoll(item));
            }
            return arr;
        }
        case Kind::real_list: {
            json arr = json::array();
            for (const auto& item : split(raw)) {
                arr.push_back(std::stod(item));
            }
            return arr;
        }
        case Kind::flag:
            return true;
        }
    } catch (const std::exception&) {
    }
    throw UsageError("invalid value '" + raw + "' for --" + def.key);
}

std::string flag_name(const std::string& key)
{
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    return "--" + name;
}

/// Merged settings: defaults < flags < config file.
class Settings {
public:
    explicit Settings(json values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.contains(key); }
    template <class T>
    T get(const std::string& key, T fallback) const
    {
        if (!values_.contains(key)) {
            return fallback;
        }
        try {
            return values_.at(key).get<T>();
        } catch (const json::exception&) {
            throw UsageError("config value for '" + key + "' has the wrong type");
        }
    }
    const json& raw() const { return values_; }

private:
    json values_;
};

Vec to_vec(const std::vector<double>& xs, int d, const std::string& what)
{
    if (xs.empty()) {
        return Vec::Zero(d);
    }
    if (static_cast<int>(xs.size()) != d) {
        throw UsageError(what + " needs " + std::to_string(d) + " coordinates");
    }
    Vec v(d);
    for (int k = 0; k < d; ++k) {
        v(k) = xs[static_cast<std::size_t>(k)];
    }
    return v;
}

int parse_orientation(const std::string& text, bool sphere_like)
{
    if (text.empty()) {
        return sphere_like ? -1 : 1;
    }
    if (text == "inner" || text == "-1" || text == "down") {
        return -1;
    }
    if (text == "outer" || text == "+1" || text == "1" || text == "up") {
        return 1;
    }
    throw UsageError("orientation must be inner, outer, +1 or -1");
}

Hypersurface build_surface(const Settings& s)
{
    const std::string kind = s.get<std::string>("surface", "sphere");
    const std::string orient = s.get<std::string>("orientation", "");
    const auto center = s.get<std::vector<double>>("center", {});
    const double radius = s.get<double>("radius", 1.0);
    if (kind == "sphere" || kind == "circle") {
        const int d = kind == "circle" ? 2 : s.get<int>("dim", 3);
        return Hypersurface::sphere(to_vec(center, d, "center"), radius, parse_orientation(orient, true));
    }
    if (kind == "plane") {
        const int d = s.get<int>("dim", 3);
        Vec normal = Vec::Zero(d);
        normal(d - 1) = 1.0;
        const auto n = s.get<std::vector<double>>("normal", {});
        if (!n.empty()) {
            normal = to_vec(n, d, "normal");
        }
        return Hypersurface::plane(to_vec(center, d, "center"), normal, radius, parse_orientation(orient, false));
    }
    if (kind == "torus") {
        return Hypersurface::torus(to_vec(center, 3, "center"), s.get<double>("major_radius", 2.0),
                                   s.get<double>("minor_radius", 0.5), parse_orientation(orient, false));
    }
    if (kind == "graph") {
        return Hypersurface::graph(to_vec(center, 3, "center"), s.get<double>("k1", 0.0), s.get<double>("k2", 0.0),
                                   radius, parse_orientation(orient, false));
    }
    if (kind == "mesh") {
        const std::string path = s.get<std::string>("mesh", "");
        if (path.empty()) {
            throw UsageError("surface mesh needs --mesh PATH");
        }
        return Hypersurface::from_mesh(read_off_file(path), parse_orientation(orient, false));
    }
    throw UsageError("unknown surface '" + kind + "'");
}

BasisConfig apply_basis(BasisConfig config, const Settings& s)
{
    config.grid = s.get<int>("grid", config.grid);
    config.rho_factor = s.get<double>("rho_factor", config.rho_factor);
    config.v_degree = s.get<int>("v_degree", config.v_degree);
    config.x_degree = s.get<int>("x_degree", config.x_degree);
    return config;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::filesystem::path output_dir(const Settings& s)
{
    if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return s.get<std::string>("out", "varicurv-out");
}

/// The spec part of the settings: everything except output plumbing.
json spec_of(const std::string& command, const Settings& s)
{
    json spec = s.raw();
    for (const char* key : {"out", "no_timestamp", "jobs"}) {
        spec.erase(key);
    }
    spec["command"] = command;
    return spec;
}

int finish(const ScenarioReport& report, const Settings& s, std::ostream& out,
           const std::vector<std::pair<std::string, std::string>>& extra_files = {})
{
    const std::string stamp = s.get<bool>("no_timestamp", false) ? std::string{} : utc_timestamp();
    const auto dir = output_dir(s);
    auto written = write_report(report, dir, stamp);
    for (const auto& [suffix, text] : extra_files) {
        const auto path = dir / (report.id + "-" + report.spec_hash.substr(0, 12) + "-" + suffix);
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw Error("cannot write " + path.string());
        }
        f << text;
        written.push_back(path);
    }
    for (const auto& v : report.verdicts) {
        out << (v.pass ? "PASS " : "FAIL ") << "[" << v.criterion << "] " << v.check << ": " << std::setprecision(6)
            << v.value << " (" << v.comparison << " " << v.threshold << ")\n";
    }
    for (const auto& n : report.notes) {
        out << "note: " << n << "\n";
    }
    for (const auto& p : written) {
        out << "wrote " << p.string() << "\n";
    }
    return report.passed() ? kExitOk : kExitVerdictFail;
}

int cmd_verify(const Settings& s, std::ostream& out)
{
    VerifySpec spec;
    spec.surface = build_surface(s);
    spec.resolutions = s.get<std::vector<int>>("resolutions", spec.resolutions);
    spec.quadrature_order = s.get<int>("order", 1);
    if (s.has("g")) {
        spec.g = ScalarPolynomial{s.get<double>("g", 0.0), {}};
    }
    if (s.has("grid") || s.has("rho_factor") || s.has("v_degree") || s.has("x_degree")) {
        spec.basis = apply_basis(BasisConfig{}, s);
    }
    spec.order_threshold = s.get<double>("order_threshold", spec.order_threshold);
    spec.residual_threshold = s.get<double>("residual_threshold", spec.residual_threshold);
    spec.jobs = s.get<int>("jobs", 1);
    return finish(verify_surface(spec), s, out);
}

ConstraintFlags parse_constraints(const std::string& text)
{
    ConstraintFlags flags;
    if (text == "none" || text == "unconstrained") {
        return flags;
    }
    for (const auto& item : split(text)) {
        if (item == "symmetric") {
            flags.symmetric = true;
        } else if (item == "tangential") {
            flags.tangential = true;
        } else if (item == "odd") {
            flags.odd = true;
        } else {
            throw UsageError("unknown constraint '" + item + "'");
        }
    }
    return flags;
}

PatchSpec parse_patches(const Settings& s, const std::string& fallback)
{
    PatchSpec spec;
    const std::string kind = s.get<std::string>("patches", fallback);
    if (kind == "grid") {
        spec.kind = PatchSpec::Kind::grid;
    } else if (kind == "single") {
        spec.kind = PatchSpec::Kind::single;
    } else if (kind == "per-pair") {
        spec.kind = PatchSpec::Kind::per_pair;
    } else if (kind == "kmeans") {
        spec.kind = PatchSpec::Kind::kmeans;
    } else {
        throw UsageError("unknown patch kind '" + kind + "'");
    }
    spec.grid_cells = s.get<int>("grid_cells", spec.grid_cells);
    spec.atoms_per_patch = s.get<int>("atoms_per_patch", spec.atoms_per_patch);
    return spec;
}

OrientedVarifold read_varifold(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open varifold file " + path);
    }
    return read_atoms_csv(in, path);
}

int cmd_recover(const Settings& s, std::ostream& out)
{
    std::optional<Hypersurface> surface;
    OrientedVarifold v;
    if (s.has("varifold")) {
        v = read_varifold(s.get<std::string>("varifold", ""));
    } else {
        surface = build_surface(s);
        v = surface->sample_varifold(QuadratureRule{s.get<int>("resolution", 16), s.get<int>("order", 1)},
                                     s.get<int>("theta1", 1), s.get<int>("theta2", 0));
    }
    BasisConfig config = apply_basis(BasisConfig{}, s);
    const std::string basis_kind = s.get<std::string>("basis", "default");
    if (basis_kind == "v-independent") {
        config.v_degree = 0;
        if (!s.has("x_degree")) {
            config.x_degree = 2;
        }
    } else if (basis_kind != "default") {
        throw UsageError("basis must be default or v-independent");
    }
    RecoveryOptions options;
    options.constraints = parse_constraints(s.get<std::string>("constraints", "symmetric,tangential"));
    // A transported constant W per cell is exact only where W is frame-invariant (umbilic or flat);
    // everything else gets small spatial clusters.
    const std::string kind = surface ? s.get<std::string>("surface", "sphere") : "";
    const bool umbilic = kind == "sphere" || kind == "circle" || kind == "plane";
    options.patches = parse_patches(s, umbilic ? "grid" : "kmeans");
    if (s.has("lambda")) {
        options.lambda = s.get<double>("lambda", 0.0);
    }
    options.relative_lambda = s.get<double>("relative_lambda", options.relative_lambda);
    options.jobs = s.get<int>("jobs", 1);
    // Open surfaces get an interior basis cube; atoms no bump reaches would leave their patch free.
    bool windowed = false;
    if (surface && !config.box_half_width) {
        config = interior_basis(*surface, config);
        windowed = config.box_half_width.has_value();
    }
    options.basis_description = config.describe();
    const std::vector<TestFunction> basis = make_basis(v, config);
    const std::size_t sampled = v.size();
    if (windowed) {
        v = v.filtered(
            [&basis](const Atom& a) {
                return std::any_of(basis.begin(), basis.end(),
                                   [&a](const TestFunction& f) { return !f.outside_support(a.x); });
            },
            v.provenance() + ", basis window");
    }
    const Recovery rec = recover_curvature(v, basis, options);
    const RecoveryReport& r = rec.report;

    ScenarioReport report;
    report.id = "recover";
    report.spec_json = spec_of("recover", s).dump();
    report.spec_hash = fnv1a_hex(report.spec_json);
    Table t{"recovery",
            {"atoms", "equations", "unknowns", "rank", "ill_posed", "min_relative_eigenvalue", "lambda",
             "relative_residual", "symmetry_defect", "tangency_defect", "oddness_defect", "l1_norm", "l2_norm",
             "relative_error"},
            {}};
    double err = std::numeric_limits<double>::quiet_NaN();
    if (surface) {
        err = relative_l2_error(v, rec.field, CurvatureField::geometric(v, *surface));
    }
    t.rows.push_back({static_cast<double>(v.size()), static_cast<double>(r.equations), static_cast<double>(r.unknowns),
                      static_cast<double>(r.rank), r.ill_posed ? 1.0 : 0.0, r.min_relative_eigenvalue, r.lambda,
                      r.relative_residual, r.symmetry_defect, r.tangency_defect, r.oddness_defect, r.l1_norm,
                      r.l2_norm, err});
    report.tables.push_back(std::move(t));
    report.notes.push_back("mode " + r.mode + ", patches " + r.patches + ", basis " + r.basis);
    if (windowed) {
        report.notes.push_back("open surface: recovery uses the " + std::to_string(v.size()) + " of " +
                               std::to_string(sampled) + " atoms inside the interior basis window");
    }
    if (r.ill_posed) {
        report.notes.push_back("normal matrix is rank deficient; minimum-norm/Tikhonov solution reported");
    }
    if (r.no_pairs) {
        report.notes.push_back("no-pairs: single-sheet input, oddness defect is 0 by convention");
    }
    if (surface) {
        report.verdicts.push_back(Verdict{"recovery-accuracy", "relative L2 error vs closed-form W", err,
                                          s.get<double>("recovery_threshold", 0.05), "<=",
                                          err <= s.get<double>("recovery_threshold", 0.05)});
    }
    std::ostringstream field;
    write_curvature_csv(field, rec.field);
    return finish(report, s, out, {{"curvature.csv", field.str()}});
}

int cmd_scenario(const std::string& id, const Settings& s, std::ostream& out)
{
    const auto ids = scenario_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        throw UsageError("unknown scenario '" + id + "'");
    }
    ScenarioSpec spec = default_scenario_spec(id);
    spec.resolutions = s.get<std::vector<int>>("resolutions", spec.resolutions);
    spec.ells = s.get<std::vector<double>>("ells", spec.ells);
    spec.radii = s.get<std::vector<double>>("radii", spec.radii);
    spec.polar_angles = s.get<std::vector<double>>("polar_angles", spec.polar_angles);
    if (s.has("g")) {
        spec.g = ScalarPolynomial{s.get<double>("g", 0.0), {}};
    }
    spec.quadrature_order = s.get<int>("order", spec.quadrature_order);
    spec.basis = apply_basis(spec.basis, s);
    spec.recovery_resolution = s.get<int>("recovery_resolution", spec.recovery_resolution);
    spec.recovery_grid_cells = s.get<int>("recovery_grid_cells", spec.recovery_grid_cells);
    spec.disc_radius = s.get<double>("disc_radius", spec.disc_radius);
    spec.basis_jitter = s.get<double>("jitter", spec.basis_jitter);
    spec.seed = s.get<unsigned>("seed", spec.seed);
    spec.jobs = s.get<int>("jobs", 1);
    return finish(run_scenario(spec), s, out);
}

int cmd_distance(const Settings& s, std::ostream& out)
{
    if (!s.has("first") || !s.has("second")) {
        throw UsageError("distance needs --first and --second");
    }
    const OrientedVarifold a = read_varifold(s.get<std::string>("first", ""));
    const OrientedVarifold b = read_varifold(s.get<std::string>("second", ""));
    const auto dictionary =
        default_dictionary(a, b, s.get<int>("dictionary_grid", 5), s.get<std::vector<double>>("dictionary_radii", {1.0, 2.0}));
    const DistanceResult d = bl_distance(a, b, dictionary);
    ScenarioReport report;
    report.id = "distance";
    report.spec_json = spec_of("distance", s).dump();
    report.spec_hash = fnv1a_hex(report.spec_json);
    report.tables.push_back(Table{"distance",
                                  {"atoms_first", "atoms_second", "mass_first", "mass_second", "dictionary_size",
                                   "distance_lower_bound", "argmax"},
                                  {{static_cast<double>(a.size()), static_cast<double>(b.size()), a.mass(), b.mass(),
                                    static_cast<double>(dictionary.size()), d.distance,
                                    static_cast<double>(d.argmax)}}});
    report.notes.push_back("bounded-Lipschitz distance lower bound over a fixed dictionary");
    if (!dictionary.empty()) {
        report.notes.push_back("attained by " + dictionary[d.argmax].id());
    }
    return finish(report, s, out);
}

json read_config(const std::string& path, const std::vector<OptionDef>& defs)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file " + path);
    }
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!config.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    std::set<std::string> known;
    for (const auto& d : defs) {
        known.insert(d.key);
    }
    for (const auto& [key, value] : config.items()) {
        if (known.count(key) == 0) {
            throw UsageError("unknown config key '" + key + "'");
        }
    }
    return config;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Oriented varifold curvature toolkit", "varicurv"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    struct Bound {
        CLI::App* app;
        std::string config;
        std::string scenario_id;
        std::map<std::string, std::string> raw;
        std::map<std::string, bool> flags;
        std::vector<OptionDef> defs;
    };
    std::map<std::string, Bound> commands;
    const std::vector<std::pair<std::string, std::string>> names = {
        {"verify", "evaluate curvature identities on a surface over a resolution schedule"},
        {"recover", "recover curvature coefficients by regularized least squares"},
        {"scenario", "run a built-in experiment: " + [] {
             std::string s;
             for (const auto& id : scenario_ids()) {
                 s += (s.empty() ? "" : ", ") + id;
             }
             return s;
         }()},
        {"distance", "bounded-Lipschitz lower bound between two atom CSVs"}};
    for (const auto& [name, help] : names) {
        Bound& b = commands[name];
        b.app = app.add_subcommand(name, help);
        b.defs = options_for(name);
        b.app->add_option("--config", b.config, "JSON config; its values override flags");
        if (name == "scenario") {
            b.app->add_option("id", b.scenario_id, "scenario id")->required();
        }
        for (const auto& def : b.defs) {
            if (def.kind == Kind::flag) {
                b.app->add_flag(flag_name(def.key), b.flags[def.key], def.help);
            } else {
                b.app->add_option(flag_name(def.key), b.raw[def.key], def.help);
            }
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        for (auto& [name, b] : commands) {
            if (b.app->parsed()) {
                json values = json::object();
                for (const auto& def : b.defs) {
                    auto* opt = b.app->get_option(flag_name(def.key));
                    if (opt->count() == 0) {
                        continue;
                    }
                    values[def.key] = def.kind == Kind::flag ? json(b.flags[def.key]) : convert(def, b.raw[def.key]);
                }
                if (!b.config.empty()) {
                    const json config = read_config(b.config, b.defs);
                    for (const auto& [key, value] : config.items()) {
                        values[key] = value;
                    }
                }
                const Settings settings(values);
                if (name == "verify") {
                    return cmd_verify(settings, out);
                }
                if (name == "recover") {
                    return cmd_recover(settings, out);
                }
                if (name == "scenario") {
                    return cmd_scenario(b.scenario_id, settings, out);
                }
                return cmd_distance(settings, out);
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    err << "usage error: no command\n";
    return kExitError;
}

} // namespace varicurv::cli
