#include <benchmark/benchmark.h>

#include "finitemix/builders.hpp"
#include "finitemix/consensus.hpp"
#include "finitemix/mixing.hpp"

namespace {

using namespace finitemix;

void BM_BuildBase(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        GraphSequence seq = base_graph(n, 1);
        benchmark::DoNotOptimize(seq);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_BuildBase)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

void BM_ToMixingMatrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GraphSequence seq = exponential(n);
    for (auto _ : state) {
        MixingMatrix w = to_mixing_matrix(seq.graphs[0]);
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BM_ToMixingMatrix)->RangeMultiplier(4)->Range(64, 16384);

void BM_ApplyMix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MixingMatrix w = to_mixing_matrix(exponential(n).graphs[0]);
    const NodeMatrix x = gaussian_node_matrix(8, n, 1);
    for (auto _ : state) {
        NodeMatrix y = apply_mix(w, x);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_ApplyMix)->RangeMultiplier(4)->Range(64, 16384);

void BM_GossipCycle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GraphSequence seq = base_graph(n, 1);
    const int iters = static_cast<int>(seq.graphs.size());
    for (auto _ : state) {
        GossipTrace trace = run_gossip(seq, 8, iters, 1);
        benchmark::DoNotOptimize(trace);
    }
}
BENCHMARK(BM_GossipCycle)->RangeMultiplier(4)->Range(64, 16384);

void BM_ConsensusRatePower(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MixingMatrix w = to_mixing_matrix(exponential(n).graphs[0]);
    for (auto _ : state) {
        RateEstimate est = consensus_rate(w);
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_ConsensusRatePower)->RangeMultiplier(4)->Range(64, 4096);

}  // namespace

BENCHMARK_MAIN();
