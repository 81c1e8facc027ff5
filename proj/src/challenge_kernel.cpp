#include "icn/challenge_kernel.hpp"

#include "icn/rng.hpp"

#include <limits>

namespace icn {

namespace {

using i128 = __int128;
constexpr std::int64_t kPpm = 1'000'000;

std::int64_t clamp_i64(i128 v)
{
    if (v > std::numeric_limits<std::int64_t>::max())
        return std::numeric_limits<std::int64_t>::max();
    if (v < 0)
        return 0;
    return static_cast<std::int64_t>(v);
}

}  // namespace

std::int64_t measure_kpi(const ChallengeTask& task, const KpiProbe& probe, const NoiseModel& noise)
{
    std::int64_t jitter = 0;
    if (noise.amplitude_ppm != 0) {
        Stream s(noise.seed, "noise", task.epoch,
                 task.hypernode + '\x1e' + task.subject + '\x1e' + probe.name);
        jitter = s.symmetric(noise.amplitude_ppm);
    }
    i128 base = probe.true_value < 0 ? 0 : probe.true_value;
    i128 faulted = base * task.fault_multiplier.num() / task.fault_multiplier.den();
    i128 noisy = faulted * (kPpm + jitter) / kPpm;
    i128 biased = noisy * task.report_bias.num() / task.report_bias.den();
    return clamp_i64(biased);
}

PerformanceReport execute_task(const ChallengeTask& task, const NoiseModel& noise)
{
    PerformanceReport r;
    r.epoch = task.epoch;
    r.subject = task.subject;
    r.challenger = task.hypernode;
    for (const auto& probe : task.probes) {
        std::int64_t measured = measure_kpi(task, probe, noise);
        r.kpis[probe.name] = measured;
        r.verdict[probe.name] = static_cast<i128>(measured) * probe.threshold.den()
                                >= static_cast<i128>(probe.threshold.num()) * probe.nominal;
    }
    return r;
}

std::vector<PerformanceReport> execute_challenges_serial(std::span<const ChallengeTask> tasks,
                                                         const NoiseModel& noise)
{
    std::vector<PerformanceReport> out;
    out.reserve(tasks.size());
    for (const auto& task : tasks)
        out.push_back(execute_task(task, noise));
    return out;
}

std::vector<PerformanceReport> execute_challenges_parallel(std::span<const ChallengeTask> tasks,
                                                           const NoiseModel& noise)
{
    std::vector<PerformanceReport> out(tasks.size());
    const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = execute_task(tasks[static_cast<std::size_t>(i)], noise);
    return out;
}

}  // namespace icn
