#include "curvlab/cones.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/invariance_lab.hpp"
#include "curvlab/quadratic_flow.hpp"
#include "curvlab/random.hpp"

#include <benchmark/benchmark.h>

using namespace curvlab;

namespace {

CurvatureOperator sample(int n, std::uint64_t index = 0) {
    Rng rng(7, "bench", index);
    return random_operator(n, rng);
}

void BM_Sharp(benchmark::State& state) {
    const CurvatureOperator r = sample(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sharp(r));
}
BENCHMARK(BM_Sharp)->DenseRange(4, 8);

void BM_QuadraticTerm(benchmark::State& state) {
    const CurvatureOperator r = sample(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(quadratic_term(r));
}
BENCHMARK(BM_QuadraticTerm)->DenseRange(4, 8);

void BM_Decompose(benchmark::State& state) {
    const CurvatureOperator r = sample(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(decompose(r));
}
BENCHMARK(BM_Decompose)->DenseRange(4, 8);

void BM_ProjectBianchi(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(3);
    const Matrix g = rng.gaussian_matrix(bivector_dim(n), bivector_dim(n));
    const Matrix s = 0.5 * (g + g.transpose());
    for (auto _ : state) benchmark::DoNotOptimize(project_bianchi(s));
}
BENCHMARK(BM_ProjectBianchi)->DenseRange(4, 8);

void BM_MarginPic(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CurvatureOperator r = sample(n) + 2.0 * CurvatureOperator::identity(n);
    PicOptions opts;
    opts.starts = 8;
    for (auto _ : state) benchmark::DoNotOptimize(margin_pic(r, opts));
}
BENCHMARK(BM_MarginPic)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

void BM_BoundaryAndProbe(benchmark::State& state) {
    const ConeSpec cone = make_cone("nno", static_cast<int>(state.range(0)));
    std::uint64_t i = 0;
    for (auto _ : state) {
        const BoundaryPoint bp = boundary_point(cone, sample(cone.n, ++i));
        if (bp.recession) continue;
        benchmark::DoNotOptimize(tangent_probe(cone, *bp.point, quadratic_term(*bp.point)));
    }
}
BENCHMARK(BM_BoundaryAndProbe)->DenseRange(4, 6);

void BM_OdeEvolve(benchmark::State& state) {
    const CurvatureOperator r = sample(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ode_evolve(r, 0.01, 1e-3));
}
BENCHMARK(BM_OdeEvolve)->DenseRange(4, 6);

void BM_HaarAverage(benchmark::State& state) {
    const CurvatureOperator r = sample(4);
    for (auto _ : state) benchmark::DoNotOptimize(haar_average(r, static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_HaarAverage)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_CheckInvariance(benchmark::State& state) {
    const ConeSpec cone = make_cone("nno", 4);
    for (auto _ : state) benchmark::DoNotOptimize(check_invariance(cone, static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_CheckInvariance)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
