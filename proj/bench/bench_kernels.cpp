#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cuspflow/kernels.hpp"

using namespace cuspflow;

namespace {

struct Problem {
    BlobSources blobs;
    LayerSources layer;
    std::vector<Vec2> targets;
};

Problem make_problem(std::size_t n) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Problem p;
    for (std::size_t j = 0; j < n; ++j) {
        p.blobs.x.push_back(U(rng));
        p.blobs.y.push_back(U(rng));
        p.blobs.q.push_back(U(rng));
        p.layer.x.push_back(3.0 + U(rng));
        p.layer.y.push_back(U(rng));
        p.layer.nx.push_back(1.0);
        p.layer.ny.push_back(0.0);
        p.layer.wmu.push_back(U(rng));
        p.targets.push_back({U(rng), U(rng)});
    }
    return p;
}

void BM_BlobVelocitySerial(benchmark::State& state) {
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
    std::vector<Vec2> out(p.targets.size());
    for (auto _ : state) {
        blob_velocity_serial(p.blobs, 0.04, p.targets, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_BlobVelocityParallel(benchmark::State& state) {
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
    std::vector<Vec2> out(p.targets.size());
    for (auto _ : state) {
        blob_velocity_parallel(p.blobs, 0.04, p.targets, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_BlobStreamSerial(benchmark::State& state) {
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(p.targets.size());
    for (auto _ : state) {
        blob_stream_serial(p.blobs, 0.04, p.targets, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_BlobStreamParallel(benchmark::State& state) {
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(p.targets.size());
    for (auto _ : state) {
        blob_stream_parallel(p.blobs, 0.04, p.targets, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_DoubleLayerSerial(benchmark::State& state) {
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
    std::vector<FieldValue> out(p.targets.size());
    for (auto _ : state) {
        double_layer_serial(p.layer, p.targets, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_DoubleLayerParallel(benchmark::State& state) {
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
    std::vector<FieldValue> out(p.targets.size());
    for (auto _ : state) {
        double_layer_parallel(p.layer, p.targets, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_BlobVelocitySerial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_BlobVelocityParallel)->Arg(1024)->Arg(4096);
BENCHMARK(BM_BlobStreamSerial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_BlobStreamParallel)->Arg(1024)->Arg(4096);
BENCHMARK(BM_DoubleLayerSerial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_DoubleLayerParallel)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
