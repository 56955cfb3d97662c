// Microbenchmarks for the hot paths: raw point generation, scrambled
// streaming, net verification, and exact star discrepancy.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "rqmc/estimate.hpp"
#include "rqmc/integrands.hpp"
#include "rqmc/netgen.hpp"
#include "rqmc/scramble.hpp"
#include "rqmc/verify.hpp"

namespace {

rqmc::ScrambleSpec nested_spec(int dim, std::uint64_t seed) {
    rqmc::ScrambleSpec s;
    s.kind = rqmc::ScrambleKind::nested_uniform;
    s.base = 2;
    s.dim = dim;
    s.seed = seed;
    return s;
}

void BM_SobolGenerate(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const std::uint64_t n = 1ull << 12;
    rqmc::GeneratorMatrixSet g = rqmc::default_sobol_matrices(dim);
    for (auto _ : state) {
        rqmc::DigitalPointSet pts = rqmc::generate_points(g, 0, n);
        benchmark::DoNotOptimize(pts.value(n - 1, dim - 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SobolGenerate)->Arg(2)->Arg(8);

void BM_ScrambledStream(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const std::uint64_t n = 1ull << 12;
    rqmc::GeneratorMatrixSet g = rqmc::default_sobol_matrices(dim);
    std::vector<double> buf(static_cast<std::size_t>(dim));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        rqmc::ScrambledStream stream(g, nested_spec(dim, seed++));
        double acc = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            stream.next(buf.data());
            acc += buf[0];
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ScrambledStream)->Arg(2)->Arg(8);

void BM_ExactT(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    rqmc::GeneratorMatrixSet g = rqmc::default_sobol_matrices(4);
    rqmc::DigitalPointSet pts = rqmc::generate_points(g, 0, 1ull << m);
    for (auto _ : state) benchmark::DoNotOptimize(rqmc::exact_t(pts, m));
}
BENCHMARK(BM_ExactT)->Arg(6)->Arg(8)->Arg(10);

void BM_StarDiscrepancyExact(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    rqmc::GeneratorMatrixSet g = rqmc::default_sobol_matrices(2);
    rqmc::DigitalPointSet pts = rqmc::generate_points(g, 0, n);
    std::vector<double> flat;
    flat.reserve(2 * n);
    for (std::uint64_t i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) flat.push_back(pts.value(i, j));
    for (auto _ : state)
        benchmark::DoNotOptimize(rqmc::star_discrepancy_exact(flat, 2).value);
}
BENCHMARK(BM_StarDiscrepancyExact)->Arg(64)->Arg(256);

void BM_ReplicateVariance(benchmark::State& state) {
    rqmc::SamplerConfig cfg;
    cfg.kind = rqmc::SamplerKind::scrambled_net;
    cfg.dim = 2;
    rqmc::Sampler sampler(cfg);
    rqmc::Integrand f = rqmc::make_integrand("smooth_product", 2, {{"c", 1.0}});
    for (auto _ : state) {
        auto st = rqmc::replicate_variance(sampler, f, 1ull << 8, 16, 1);
        benchmark::DoNotOptimize(st.variance);
    }
}
BENCHMARK(BM_ReplicateVariance);

} // namespace

BENCHMARK_MAIN();
