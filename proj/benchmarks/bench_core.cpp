#include "varicurv/curvature_field.hpp"
#include "varicurv/geometry.hpp"
#include "varicurv/identities.hpp"
#include "varicurv/recovery.hpp"
#include "varicurv/varifold.hpp"

#include <benchmark/benchmark.h>

using namespace varicurv;

namespace {

Hypersurface inner_sphere()
{
    return Hypersurface::sphere(Vec::Zero(3), 1.0, -1);
}

void BM_SampleSphere(benchmark::State& state)
{
    const auto s = inner_sphere();
    const QuadratureRule rule{static_cast<int>(state.range(0)), 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.sample_varifold(rule));
    }
    state.SetItemsProcessed(state.iterations() * 8 * state.range(0) * state.range(0));
}
BENCHMARK(BM_SampleSphere)->Arg(16)->Arg(64);

void BM_CurvatureIdentityTable(benchmark::State& state)
{
    const auto s = inner_sphere();
    const auto v = s.sample_varifold(QuadratureRule{static_cast<int>(state.range(0)), 1});
    const auto w = CurvatureField::geometric(v, s);
    const auto basis = make_basis(v, BasisConfig{});
    EvalOptions options;
    options.jobs = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(curvature_identity_residuals(v, w, basis, options));
    }
}
BENCHMARK(BM_CurvatureIdentityTable)->Args({16, 1})->Args({32, 1})->Args({32, 4})->Unit(benchmark::kMillisecond);

void BM_Recovery(benchmark::State& state)
{
    const auto v = inner_sphere().sample_varifold(QuadratureRule{static_cast<int>(state.range(0)), 1},
                                                  1, static_cast<int>(state.range(1)));
    const auto basis = make_basis(v, BasisConfig{});
    RecoveryOptions options;
    options.constraints = ConstraintFlags{};
    for (auto _ : state) {
        benchmark::DoNotOptimize(recover_curvature(v, basis, options));
    }
}
BENCHMARK(BM_Recovery)->Args({8, 0})->Args({16, 0})->Args({16, 1})->Unit(benchmark::kMillisecond);

void BM_BoundedLipschitzDistance(benchmark::State& state)
{
    const auto a = inner_sphere().sample_varifold(QuadratureRule{static_cast<int>(state.range(0)), 1});
    const auto b = a.translated((Vec(3) << 0.05, 0.0, 0.0).finished(), "shifted");
    const auto dictionary = default_dictionary(a, b);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bl_distance(a, b, dictionary));
    }
}
BENCHMARK(BM_BoundedLipschitzDistance)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Hutchinson(benchmark::State& state)
{
    const Vec v = (Vec(3) << 0.0, 0.6, 0.8).finished();
    const Mat w = 0.5 * (Mat::Identity(3, 3) - v * v.transpose());
    for (auto _ : state) {
        benchmark::DoNotOptimize(from_hutchinson(to_hutchinson(w, v), v));
    }
}
BENCHMARK(BM_Hutchinson);

} // namespace

BENCHMARK_MAIN();
