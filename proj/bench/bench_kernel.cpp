#include "icn/challenge_kernel.hpp"
#include "icn/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace icn;

std::vector<ChallengeTask> make_tasks(std::size_t n)
{
    std::vector<ChallengeTask> tasks;
    Stream rng(1);
    for (std::size_t i = 0; i < n; ++i) {
        ChallengeTask t;
        t.epoch = 7;
        t.hypernode = "hn-" + std::to_string(i % 5);
        t.subject = "node-" + std::to_string(i);
        for (const char* k : {"iops", "read_mbps", "write_mbps", "latency_us"})
            t.probes.push_back({k, 1'000'000, static_cast<std::int64_t>(rng.between(500'000, 1'500'000)), Ratio(4, 5)});
        tasks.push_back(std::move(t));
    }
    return tasks;
}

void BM_Serial(benchmark::State& state)
{
    auto tasks = make_tasks(state.range(0));
    NoiseModel noise{42, 20'000};
    for (auto _ : state)
        benchmark::DoNotOptimize(execute_challenges_serial(tasks, noise));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state)
{
    auto tasks = make_tasks(state.range(0));
    NoiseModel noise{42, 20'000};
    for (auto _ : state)
        benchmark::DoNotOptimize(execute_challenges_parallel(tasks, noise));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(BM_Parallel)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();

BENCHMARK_MAIN();
