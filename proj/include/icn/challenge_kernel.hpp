#pragma once

#include "icn/report.hpp"
#include "icn/types.hpp"

#include <span>
#include <vector>

namespace icn {

struct KpiProbe {
    KpiName name;
    std::int64_t nominal = 0;
    std::int64_t true_value = 0;
    /// Pass iff measured >= threshold * nominal.
    Ratio threshold = Ratio::one();
};

/// Everything needed to run one HyperNode's challenges against one subject.
/// Self-contained, so tasks can execute in any order on any thread.
struct ChallengeTask {
    Epoch epoch = 0;
    HyperNodeId hypernode;
    SubjectId subject;
    std::vector<KpiProbe> probes;
    /// Injected fault, 1 when healthy.
    Ratio fault_multiplier = Ratio::one();
    /// Misreporting HyperNodes scale what they publish; 1 when honest.
    Ratio report_bias = Ratio::one();
};

struct NoiseModel {
    std::uint64_t seed = 0;
    /// Relative amplitude in parts per million; noise is uniform in
    /// [-amplitude, +amplitude].
    std::uint64_t amplitude_ppm = 0;
};

/// measured = floor(true * fault * (1 + noise)) * bias, with noise drawn
/// from the (seed, epoch, hypernode, subject, kpi) sub-stream.
std::int64_t measure_kpi(const ChallengeTask& task, const KpiProbe& probe, const NoiseModel& noise);

PerformanceReport execute_task(const ChallengeTask& task, const NoiseModel& noise);

/// Reference implementation: one task after another.
std::vector<PerformanceReport> execute_challenges_serial(std::span<const ChallengeTask> tasks,
                                                         const NoiseModel& noise);

/// OpenMP version. Output order matches the input order, so results are
/// identical to the serial path.
std::vector<PerformanceReport> execute_challenges_parallel(std::span<const ChallengeTask> tasks,
                                                           const NoiseModel& noise);

}  // namespace icn
