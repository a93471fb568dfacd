// Serial versus parallel matrix runner, and the two dual-encoding propagators.

#include <bincsp/bench.hpp>
#include <bincsp/encode.hpp>
#include <bincsp/gen.hpp>
#include <bincsp/propagate.hpp>

#include <benchmark/benchmark.h>

using namespace bincsp;

namespace {

auto model_b_matrix() -> std::vector<MatrixEntry>
{
    MatrixEntry e;
    e.generator = GeneratorSpec{"modelb", parse_params("n=12,d=4,k=3,p=8,q=45"), 0};
    e.algorithms = {"MGAC-2001", "MHAC-2001", "MAC-PW-ACd", "hFC3"};
    e.seeds.clear();
    for (std::uint64_t s = 0; s < 16; ++s)
        e.seeds.push_back(s);
    return {e};
}

auto matrix_runner(benchmark::State & state)
{
    auto m = model_b_matrix();
    RunSettings settings{static_cast<int>(state.range(0)), true};
    for (auto _ : state)
        benchmark::DoNotOptimize(run_matrix(m, settings).runs.size());
}
BENCHMARK(matrix_runner)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

auto dual_propagators(benchmark::State & state)
{
    std::vector<EncodedProblem> models;
    for (std::uint64_t s = 0; s < 20; ++s)
        models.push_back(build_de(gen_model_b({20, 5, 3, 3, 40, s})));
    bool piecewise = state.range(0) == 1;
    for (auto _ : state)
        for (auto & ep : models)
            benchmark::DoNotOptimize((piecewise ? pwac(ep) : ac2001(ep)).verdict);
    state.SetLabel(piecewise ? "pwac" : "ac2001");
}
BENCHMARK(dual_propagators)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
