// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Individual checks are listed first, indented, so a failure can be traced.

#include "varicurv/curvature_field.hpp"
#include "varicurv/geometry.hpp"
#include "varicurv/recovery.hpp"
#include "varicurv/scenarios.hpp"
#include "varicurv/varifold.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace varicurv;

namespace {

struct Criterion {
    int number;
    std::string name;
    std::string title;
    std::vector<Verdict> checks;
};

Verdict check_le(const std::string& criterion, const std::string& what, double value, double threshold)
{
    return Verdict{criterion, what, value, threshold, "<=", value <= threshold};
}

Mat random_matrix(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Mat a(3, 3);
    for (int i = 0; i < 9; ++i) {
        a(i / 3, i % 3) = n(rng);
    }
    return a;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main()
{
    std::vector<Criterion> criteria = {
        {1, "identity-convergence", "sphere identity convergence", {}},
        {2, "cmc-prescription", "CMC prescription on the radius-2 sphere", {}},
        {3, "cancellation", "double-plane cancellation", {}},
        {4, "oddness-uniqueness", "oddness and uniqueness of recovered W", {}},
        {5, "structure", "symmetry and tangency of W", {}},
        {6, "hutchinson", "Hutchinson conversion", {}},
        {7, "translated-spheres", "translated spheres", {}},
        {8, "riemannian-identity", "latitude circles on S^2", {}},
        {9, "measure-plumbing", "measure plumbing", {}},
        {10, "reproducibility", "byte-identical reports", {}},
    };
    std::map<std::string, Criterion*> by_name;
    for (auto& c : criteria) {
        by_name[c.name] = &c;
    }
    const auto absorb = [&](const ScenarioReport& report) {
        for (const auto& v : report.verdicts) {
            const auto it = by_name.find(v.criterion);
            if (it != by_name.end()) {
                Verdict tagged = v;
                tagged.check = report.id + ": " + v.check;
                it->second->checks.push_back(tagged);
            }
        }
    };

    // 1: the identity check on the unit sphere alone, timed.
    {
        VerifySpec spec;
        const auto start = std::chrono::steady_clock::now();
        const auto report = verify_surface(spec);
        const double elapsed = seconds_since(start);
        for (const auto& v : report.verdicts) {
            if (v.criterion == "identity-convergence") {
                Verdict tagged = v;
                tagged.check = "unit sphere: " + v.check;
                criteria[0].checks.push_back(tagged);
            }
        }
        criteria[0].checks.push_back(check_le("identity-convergence", "unit sphere runtime [s]", elapsed, 60.0));
    }

    // Scenario runs, each twice for criterion 10. Recovery-accuracy verdicts feed criterion 4.
    for (const auto& id : scenario_ids()) {
        const auto spec = default_scenario_spec(id);
        const auto first = run_scenario(spec);
        const auto second = run_scenario(spec);
        absorb(first);
        for (const auto& v : first.verdicts) {
            if (v.criterion == "recovery-accuracy") {
                Verdict tagged = v;
                tagged.check = first.id + ": " + v.check;
                criteria[3].checks.push_back(tagged);
            }
        }
        const bool same = report_json(first) == report_json(second);
        criteria[9].checks.push_back(
            Verdict{"reproducibility", id + ": identical report bytes", same ? 1.0 : 0.0, 1.0, "==", same});
    }

    // 5: geometric W on the torus, both sheets.
    {
        const auto torus = Hypersurface::torus(Vec::Zero(3), 2.0, 0.5, 1);
        const auto v = torus.sample_varifold(QuadratureRule{16, 1}, 1, 1);
        const auto d = structure_defects(v, CurvatureField::geometric(v, torus));
        criteria[4].checks.push_back(check_le("structure", "torus geometric symmetry defect", d.symmetry, 1e-12));
        criteria[4].checks.push_back(check_le("structure", "torus geometric tangency defect", d.tangency, 1e-12));
    }

    // 9: projection invariants on 10^4 random atoms.
    {
        std::mt19937_64 rng(0xacce97);
        std::normal_distribution<double> n(0.0, 1.0);
        std::vector<Atom> atoms;
        for (int k = 0; k < 10000; ++k) {
            Vec x(3), v(3);
            for (int a = 0; a < 3; ++a) {
                x(a) = n(rng);
                v(a) = n(rng);
            }
            atoms.push_back(Atom{x, v.normalized(), std::abs(n(rng))});
        }
        const OrientedVarifold varifold(atoms, 3, "random");
        const auto pushed = pushforward_unoriented(varifold);
        double idem = 0.0, trace = 0.0, kernel = 0.0;
        for (std::size_t k = 0; k < pushed.size(); ++k) {
            const Mat& p = pushed[k].projection;
            idem = std::max(idem, (p * p - p).norm());
            trace = std::max(trace, std::abs(p.trace() - 2.0));
            kernel = std::max(kernel, (p * atoms[k].v).norm());
        }
        auto& c = criteria[8].checks;
        c.push_back(check_le("measure-plumbing", "random atoms max |P^2 - P|", idem, 1e-12));
        c.push_back(check_le("measure-plumbing", "random atoms max |tr P - n|", trace, 1e-12));
        c.push_back(check_le("measure-plumbing", "random atoms max |P v|", kernel, 1e-12));
        c.push_back(check_le("measure-plumbing", "random atoms |mass(q#V) - mass(V)|",
                             std::abs(unoriented_mass(pushed) - varifold.mass()), 0.0));
    }

    // 6: roundtrip also on random tangential W, beyond the sphere.
    {
        std::mt19937_64 rng(0x4c7);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            Vec v(3);
            const Mat a = random_matrix(rng);
            v = a.col(0).normalized();
            const Mat p = Mat::Identity(3, 3) - v * v.transpose();
            const Mat w = random_matrix(rng) * p;
            worst = std::max(worst, (from_hutchinson(to_hutchinson(w, v), v) - w).norm() / w.norm());
        }
        criteria[5].checks.push_back(check_le("hutchinson", "random tangential W roundtrip (relative)", worst, 1e-12));
    }

    int failures = 0;
    for (const auto& c : criteria) {
        for (const auto& v : c.checks) {
            std::printf("    %s [%d] %s: %.6g (%s %.3g)\n", v.pass ? "ok  " : "FAIL", c.number, v.check.c_str(),
                        v.value, v.comparison.c_str(), v.threshold);
        }
    }
    std::printf("\n");
    for (const auto& c : criteria) {
        bool pass = !c.checks.empty();
        for (const auto& v : c.checks) {
            pass = pass && v.pass;
        }
        failures += pass ? 0 : 1;
        std::printf("%s %2d %s (%zu checks)\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str(), c.checks.size());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
