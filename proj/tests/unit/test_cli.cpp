#include "varicurv/geometry.hpp"
#include "varicurv/varifold.hpp"
#include "varicurv_cli/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace varicurv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        unsetenv(cli::kOutputEnv);
        dir_ = fs::temp_directory_path() /
               ("varicurv-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override
    {
        unsetenv(cli::kOutputEnv);
        fs::remove_all(dir_);
    }

    Outcome run(std::vector<std::string> args)
    {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return {code, out.str(), err.str()};
    }

    fs::path write(const std::string& name, const std::string& text)
    {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    nlohmann::json only_report(const fs::path& where)
    {
        for (const auto& e : fs::directory_iterator(where)) {
            if (e.path().extension() == ".json") {
                std::ifstream in(e.path());
                return nlohmann::json::parse(in);
            }
        }
        ADD_FAILURE() << "no report in " << where;
        return {};
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, VerifyRadiusTwoSphere)
{
    const auto r = run({"verify", "--surface", "sphere", "--radius", "2", "--g", "1", "--resolutions", "16,32,64",
                        "--out", (dir_ / "out").string()});
    EXPECT_EQ(r.code, cli::kExitOk) << r.out << r.err;
    const auto report = only_report(dir_ / "out");
    EXPECT_TRUE(report.contains("timestamp"));
    const auto& table = report["tables"][0];
    const auto& cols = table["columns"];
    const auto col = std::find(cols.begin(), cols.end(), "curvature_max_normalized") - cols.begin();
    double previous = 1.0;
    for (const auto& row : table["rows"]) {
        const double value = row[static_cast<std::size_t>(col)].get<double>();
        EXPECT_LT(value, previous);
        previous = value;
    }
}

TEST_F(Cli, VerdictFailureExitsTwo)
{
    const auto r = run({"verify", "--resolutions", "8,16", "--residual-threshold", "1e-12", "--out",
                        dir_.string(), "--no-timestamp"});
    EXPECT_EQ(r.code, cli::kExitVerdictFail);
    EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, ScenarioDoublePlane)
{
    const auto r = run({"scenario", "double-plane", "--out", dir_.string(), "--no-timestamp"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    const auto report = only_report(dir_);
    EXPECT_FALSE(report.contains("timestamp"));
    const auto& cols = report["tables"][0]["columns"];
    EXPECT_NE(std::find(cols.begin(), cols.end(), "max_average_mean_norm"), cols.end());
}

TEST_F(Cli, MalformedCsvIsAnError)
{
    const auto csv = write("atoms.csv", "x1,x2,x3,v1,v2,v3,mass\n0,0,0,0,0,1,1\n0,0,abc,0,0,1,1\n");
    const auto r = run({"recover", "--varifold", csv.string(), "--basis", "default", "--out", dir_.string()});
    EXPECT_EQ(r.code, cli::kExitError);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, RecoverFromCsvWritesField)
{
    const auto v = Hypersurface::sphere(Vec::Zero(3), 1.0, -1).sample_varifold(QuadratureRule{6, 1});
    std::ostringstream csv;
    write_atoms_csv(csv, v);
    const auto path = write("sphere.csv", csv.str());
    const auto r = run({"recover", "--varifold", path.string(), "--out", (dir_ / "out").string(), "--no-timestamp"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    bool field = false;
    for (const auto& e : fs::directory_iterator(dir_ / "out")) {
        field = field || e.path().string().ends_with("-curvature.csv");
    }
    EXPECT_TRUE(field);
}

TEST_F(Cli, RecoverOnOpenSurfaceUsesInteriorWindow)
{
    const auto r = run({"recover", "--surface", "graph", "--k1", "0.7", "--k2", "-0.4", "--theta1", "1", "--theta2",
                        "1", "--recovery-threshold", "0.1", "--out", (dir_ / "out").string(), "--no-timestamp"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.out << r.err;
    const auto report = only_report(dir_ / "out");
    const auto& cols = report["tables"][0]["columns"];
    const auto atoms = std::find(cols.begin(), cols.end(), "atoms") - cols.begin();
    const double used = report["tables"][0]["rows"][0][static_cast<std::size_t>(atoms)].get<double>();
    EXPECT_GT(used, 0.0);
    EXPECT_LT(used, 2048.0);
    EXPECT_NE(r.out.find("interior basis window"), std::string::npos);
    EXPECT_NE(r.out.find("kmeans"), std::string::npos);
}

TEST_F(Cli, ConfigOverridesFlagsAndRejectsUnknownKeys)
{
    const auto config = write("c.json", R"({"resolutions": [16, 32], "no_timestamp": true})");
    const auto r = run({"verify", "--resolutions", "8,16", "--config", config.string(), "--out",
                        (dir_ / "out").string()});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    const auto report = only_report(dir_ / "out");
    EXPECT_EQ(report["spec"]["resolutions"], nlohmann::json::array({16, 32}));
    EXPECT_FALSE(report.contains("timestamp"));

    const auto bad = write("bad.json", R"({"resolution": [8, 16]})");
    const auto b = run({"verify", "--config", bad.string()});
    EXPECT_EQ(b.code, cli::kExitError);
    EXPECT_NE(b.err.find("resolution"), std::string::npos);
}

TEST_F(Cli, EnvironmentOverridesOutput)
{
    setenv(cli::kOutputEnv, (dir_ / "env").string().c_str(), 1);
    const auto r = run({"scenario", "latitude-circles", "--resolutions", "8,16", "--out", (dir_ / "flag").string()});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "env"));
    EXPECT_FALSE(fs::exists(dir_ / "flag"));
}

TEST_F(Cli, DistanceBetweenCsvFiles)
{
    const auto s = Hypersurface::sphere(Vec::Zero(3), 1.0).sample_varifold(QuadratureRule{4, 1});
    std::ostringstream a, b;
    write_atoms_csv(a, s);
    write_atoms_csv(b, s.translated((Vec(3) << 0.1, 0, 0).finished(), "shifted"));
    const auto pa = write("a.csv", a.str());
    const auto pb = write("b.csv", b.str());
    const auto r = run({"distance", "--first", pa.string(), "--second", pb.string(), "--out", dir_.string()});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    const auto report = only_report(dir_);
    const double d = report["tables"][0]["rows"][0][5].get<double>();
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, s.mass() * 0.1);
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, cli::kExitError);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitError);
    EXPECT_EQ(run({"verify", "--radius", "two"}).code, cli::kExitError);
    EXPECT_EQ(run({"verify", "--surface", "klein"}).code, cli::kExitError);
    EXPECT_EQ(run({"scenario", "no-such"}).code, cli::kExitError);
    EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}
