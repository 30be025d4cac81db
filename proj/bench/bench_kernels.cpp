// OpenMP kernels against their serial references. Set OMP_NUM_THREADS to compare.
#include <benchmark/benchmark.h>

#include <cmath>

#include "firefit/concentric.hpp"
#include "firefit/detection.hpp"
#include "firefit/objective.hpp"
#include "firefit/spectral.hpp"

using namespace firefit;

namespace {

ScalarField cone(std::size_t n) {
    const Grid g = make_grid(n, n, 1.0, 1.0);
    ScalarField T(g);
    const double c = 0.5 * static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) T.at(i, j) = std::hypot(i - c, j - c);
    return T;
}

void BM_UpwindNorm(benchmark::State& st) {
    const auto T = cone(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(upwind_gradient_norm(T));
}
void BM_UpwindNormSerial(benchmark::State& st) {
    const auto T = cone(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::upwind_gradient_norm(T));
}

void BM_Objective(benchmark::State& st) {
    const auto T = cone(static_cast<std::size_t>(st.range(0)));
    const auto ros = RosModel::uniform(T.grid(), 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(objective(T, ros, {}));
}
void BM_ObjectiveSerial(benchmark::State& st) {
    const auto T = cone(static_cast<std::size_t>(st.range(0)));
    const auto ros = RosModel::uniform(T.grid(), 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(serial::objective(T, ros, {}));
}

struct LikelihoodCase {
    ScalarField T;
    std::vector<DetectionRecord> recs;
    DetectionConfig cfg;
};

LikelihoodCase likelihood_case() {
    const Grid g = make_grid(100, 100, 100.0, 100.0);
    const auto ros = RosModel::uniform(g, 0.5);
    DetectionConfig cfg;
    auto T = ignition_arrival(ros, {4950.0, 4950.0, 0.0});
    auto recs = sample_detections(T, 1000, 0.0, 10000.0, cfg, 1);
    return {std::move(T), std::move(recs), cfg};
}

void BM_Likelihood(benchmark::State& st) {
    const auto c = likelihood_case();
    for (auto _ : st) benchmark::DoNotOptimize(data_log_likelihood(c.T, c.recs, c.cfg));
}
void BM_LikelihoodSerial(benchmark::State& st) {
    const auto c = likelihood_case();
    for (auto _ : st) benchmark::DoNotOptimize(serial::data_log_likelihood(c.T, c.recs, c.cfg));
}

void BM_SpectralFFT(benchmark::State& st) {
    const auto T = cone(static_cast<std::size_t>(st.range(0)));
    const SpectralOperator S(T.grid(), 1.4);
    for (auto _ : st) benchmark::DoNotOptimize(S.apply(T));
}
void BM_SpectralCosineSum(benchmark::State& st) {
    const auto T = cone(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(serial::spectral_apply(T.grid(), 1.4, T.values(), false));
}

}  // namespace

BENCHMARK(BM_UpwindNorm)->Arg(100)->Arg(400);
BENCHMARK(BM_UpwindNormSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_Objective)->Arg(100)->Arg(400);
BENCHMARK(BM_ObjectiveSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_Likelihood);
BENCHMARK(BM_LikelihoodSerial);
BENCHMARK(BM_SpectralFFT)->Arg(32)->Arg(100);
BENCHMARK(BM_SpectralCosineSum)->Arg(32)->Arg(100);

BENCHMARK_MAIN();
