#include <benchmark/benchmark.h>

#include "fwgraph/config.hpp"
#include "fwgraph/parallel.hpp"
#include "fwgraph/pipeline.hpp"

namespace {

using namespace fwg;

const Model& two_triangles() {
    static const Model m = build_model(load_config(FWGRAPH_FIXTURE_DIR "/two_triangles.json"));
    return m;
}

const ProcessGenerator& backend(bool pipeline) {
    static const ProcessGenerator direct = direct_process(two_triangles().graph, two_triangles().fw, 0.05);
    static const ProcessGenerator glued = construct_paper_pipeline(two_triangles().graph, two_triangles().fw, two_triangles().delta, 0.05).x5;
    return pipeline ? glued : direct;
}

constexpr std::size_t kPaths = 256;

double run_batch(const ProcessGenerator& p, int workers) {
    const RandomStream root(1);
    auto one = [&](std::size_t i) {
        RandomStream s = root.child(i);
        return p.run(two_triangles().start, 2.0, s).end_time();
    };
    const auto t = workers == 0 ? serial_map<double>(kPaths, one) : parallel_map<double>(kPaths, one, workers);
    double sum = 0.0;
    for (double x : t) sum += x;
    return sum;
}

void BM_Serial(benchmark::State& state) {
    const auto& p = backend(state.range(0) != 0);
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(p, 0));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kPaths));
}

void BM_Parallel(benchmark::State& state) {
    const auto& p = backend(state.range(0) != 0);
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(p, workers));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kPaths));
}

}  // namespace

// arg 0: direct (0) or pipeline (1); arg 1: workers
BENCHMARK(BM_Serial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Args({0, 1})->Args({0, 4})->Args({1, 1})->Args({1, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
