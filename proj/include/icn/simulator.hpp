#pragma once

#include "icn/protocol.hpp"
#include "icn/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace icn {

struct MetricsFrame {
    Epoch epoch = 0;
    std::map<RegionId, CapacityVector> region_residual;
    std::size_t live_instances = 0;
    TokenAmount bootstrap_rewards;
    TokenAmount access_fee_rewards;
    TokenAmount burned_total;
    TokenAmount emitted_total;
    std::size_t faults = 0;
    std::size_t rejected_events = 0;
    bool conservation = true;
};

struct RejectedEvent {
    Epoch epoch = 0;
    std::size_t index = 0;
    std::string action;
    Errc code = Errc::InvalidParameters;
    std::string message;
};

/// Cross-epoch checks that need history: anchors are append-only and NFT
/// sinks never grow. Stateless checks are delegated to the protocol.
class InvariantMonitor {
public:
    /// Completeness and fault-to-slash coupling for one challenge round.
    /// `expected_reports` is min(k, #eligible) measured before the round.
    std::vector<std::string> after_challenges(const Protocol& p, const ChallengeRound& round,
                                              const std::vector<SubjectId>& subjects,
                                              std::size_t expected_reports) const;
    /// Split exactness, billing conservation and emission accounting.
    std::vector<std::string> after_settlement(const Protocol& p, const SettlementResult& result,
                                              TokenAmount emitted_before) const;
    std::vector<std::string> end_of_epoch(const Protocol& p);

private:
    std::vector<std::pair<AnchorId, Digest>> anchors_;
    std::map<NftId, TokenAmount> sinks_;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<Epoch> epochs;
    bool parallel = true;
};

struct RunResult {
    /// 0 success, 1 invariant violation.
    int exit_status = 0;
    std::string violation;
    std::uint64_t seed = 0;
    Epoch epochs = 0;
    std::vector<MetricsFrame> frames;
    std::vector<RewardStatement> statements;
    std::vector<FaultEvent> faults;
    std::vector<RejectedEvent> rejected;
    std::string metrics_csv;
    nlohmann::json summary;
    nlohmann::json final_state;
};

/// Epoch loop: expire bookings, apply scripted events, challenge round with
/// fault slashing, settlement, epoch advance, invariant suite, metrics frame.
RunResult run_scenario(Scenario scenario, const RunOptions& options = {});

/// Writes metrics.csv, summary.json and final_state.json into `dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

std::string metrics_header();

}  // namespace icn
