#pragma once

#include "icn/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>

namespace icn {

/// One HyperNode's measurement of one subject in one epoch.
///
/// The canonical serialization is compact UTF-8 JSON with sorted keys and
/// integer KPI values in milli-units; its bytes are what gets hashed into
/// the Merkle commitment.
struct PerformanceReport {
    Epoch epoch = 0;
    SubjectId subject;
    HyperNodeId challenger;
    KpiMap kpis;
    std::map<KpiName, bool> verdict;

    bool passed() const;
    std::string canonical() const;
    nlohmann::json to_json() const;
    static PerformanceReport from_json(const nlohmann::json& doc);

    bool operator==(const PerformanceReport&) const = default;
};

/// Median-aggregated outcome over the k reports of one subject.
struct AggregateRecord {
    Epoch epoch = 0;
    SubjectId subject;
    KpiMap medians;
    std::map<KpiName, bool> verdict;
    /// Relative shortfall of the worst failing KPI, in [0,1]; 0 on pass.
    Ratio severity;

    bool passed() const;
    std::string canonical() const;
    nlohmann::json to_json() const;
    static AggregateRecord from_json(const nlohmann::json& doc);
};

}  // namespace icn
