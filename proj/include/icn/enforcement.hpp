#pragma once

#include "icn/challenge_kernel.hpp"
#include "icn/ledger.hpp"
#include "icn/merkle.hpp"
#include "icn/registry.hpp"
#include "icn/report.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

namespace icn {

/// A pluggable challenge. `subject` names either a hardware class or a
/// service; both kinds are scheduled and verified the same way.
struct ChallengeSpec {
    std::string kind;
    std::string subject;
    std::vector<KpiName> kpis;
    /// Minimum fraction of nominal per KPI, each in (0,1].
    std::map<KpiName, Ratio> pass_thresholds;
};

/// A service block challenged like hardware. Faults are charged to the
/// node hosting it.
struct Service {
    std::string id;
    NodeId host_node;
    KpiMap performance_profile;
};

struct HyperNode {
    HyperNodeId id;
    AccountId operator_account;
    /// Scale applied to published measurements; 1 for an honest HyperNode.
    Ratio report_bias = Ratio::one();
};

struct Assignment {
    Epoch epoch = 0;
    HyperNodeId hypernode;
    SubjectId subject;
    std::vector<std::string> kinds;

    auto operator<=>(const Assignment&) const = default;
};

struct FaultEvent {
    Epoch epoch = 0;
    SubjectId subject;
    /// Node whose positions are slashed (the subject itself or a service host).
    NodeId node;
    Ratio severity;
};

struct AggregateOutcome {
    AggregateRecord record;
    AnchorId anchor = 0;
    std::optional<FaultEvent> fault;
    /// Challengers whose report strayed outside the noise envelope.
    std::vector<HyperNodeId> misreporters;
};

/// Retention-limited data-availability store. Entries are immutable while
/// retained; an entry from epoch e is readable at `now` iff now - e < retention.
class SatelliteStore {
public:
    using Key = std::tuple<Epoch, SubjectId, HyperNodeId>;

    explicit SatelliteStore(std::uint64_t retention_epochs = 1);

    std::uint64_t retention() const noexcept { return retention_; }
    void put(const PerformanceReport& report);
    std::optional<PerformanceReport> get(Epoch epoch, const SubjectId& subject,
                                         const HyperNodeId& challenger) const;
    /// Reports for (epoch, subject), ordered by challenger id.
    std::vector<PerformanceReport> reports_for(Epoch epoch, const SubjectId& subject) const;
    std::size_t size() const noexcept { return entries_.size(); }
    void evict(Epoch now);
    const std::map<Key, PerformanceReport>& entries() const noexcept { return entries_; }

private:
    std::uint64_t retention_;
    std::map<Key, PerformanceReport> entries_;
};

/// Leaves committed under one anchor, kept while retained so inclusion
/// proofs can be produced for them.
struct CommittedBatch {
    Epoch epoch = 0;
    SubjectId subject;
    AnchorId anchor = 0;
    std::vector<std::string> leaves;
};

struct EnforcementConfig {
    std::uint64_t seed = 0;
    std::uint64_t replication_factor = 3;
    /// Relative noise amplitude.
    Ratio noise_amplitude = Ratio::zero();
    std::uint64_t retention_epochs = 16;
    /// Severity applied to a HyperNode caught misreporting.
    Ratio challenger_slash_rate = Ratio::zero();
};

/// The HyperNode network: schedules challenges, stores reports in the
/// satellite store, aggregates by median, anchors Merkle roots on the
/// ledger and turns failed aggregates into fault events.
class PerformanceEnforcement {
public:
    explicit PerformanceEnforcement(EnforcementConfig config = {});

    const EnforcementConfig& config() const noexcept { return config_; }

    void add_hypernode(HyperNode hypernode, Ledger& ledger);
    void add_service(Service service);
    std::string register_challenge_spec(const ChallengeSpec& spec,
                                        const HardwareRegistry& registry);

    void inject_fault(const SubjectId& subject, Ratio multiplier, Epoch from, Epoch duration);
    Ratio fault_multiplier(const SubjectId& subject, Epoch epoch) const;

    /// HyperNodes with positive security, by id.
    std::vector<HyperNodeId> eligible_hypernodes(const Ledger& ledger) const;
    /// Active subjects with at least one applicable challenge, by id.
    std::vector<SubjectId> active_subjects(const HardwareRegistry& registry) const;

    std::vector<Assignment> schedule_challenges(Epoch epoch, const HardwareRegistry& registry,
                                                const Ledger& ledger) const;
    ChallengeTask build_task(const Assignment& assignment, const HardwareRegistry& registry) const;
    PerformanceReport execute_challenge(const Assignment& assignment,
                                        const HardwareRegistry& registry) const;
    void publish(const PerformanceReport& report) { store_.put(report); }

    /// Requires every assigned report for (epoch, subject) in the store.
    AggregateOutcome aggregate_and_commit(Epoch epoch, const SubjectId& subject,
                                          const std::vector<HyperNodeId>& challengers,
                                          const HardwareRegistry& registry, Ledger& ledger);

    /// Full challenge round for `epoch`: schedule, execute, publish,
    /// aggregate and anchor. Slashing is left to the caller.
    std::vector<AggregateOutcome> run_round(Epoch epoch, const HardwareRegistry& registry,
                                            Ledger& ledger, bool parallel = true);

    void evict(Epoch now);

    std::optional<MerkleProof> proof_for(AnchorId anchor, std::size_t leaf) const;
    const CommittedBatch* batch_for(AnchorId anchor) const;

    const SatelliteStore& store() const noexcept { return store_; }
    const std::map<std::string, ChallengeSpec>& specs() const noexcept { return specs_; }
    const std::map<std::string, Service>& services() const noexcept { return services_; }
    const std::map<HyperNodeId, HyperNode>& hypernodes() const noexcept { return hypernodes_; }
    const std::vector<Assignment>& last_assignments() const noexcept { return last_assignments_; }
    const std::map<SubjectId, KpiMap>& latest_kpis() const noexcept { return latest_kpis_; }
    const std::map<SubjectId, AggregateRecord>& latest_aggregates() const noexcept
    {
        return latest_aggregates_;
    }

    nlohmann::json to_json() const;
    static PerformanceEnforcement from_json(const nlohmann::json& doc);

private:
    struct SubjectProfile {
        NodeId host;
        KpiMap nominal;
        KpiMap actual;
        std::map<KpiName, Ratio> thresholds;
        std::vector<std::string> kinds;
    };
    std::optional<SubjectProfile> profile(const SubjectId& subject,
                                          const HardwareRegistry& registry) const;
    NoiseModel noise() const;

    struct FaultWindow {
        Ratio multiplier;
        Epoch from = 0;
        Epoch until = 0;
    };

    EnforcementConfig config_;
    std::map<std::string, ChallengeSpec> specs_;
    std::map<std::string, Service> services_;
    std::map<HyperNodeId, HyperNode> hypernodes_;
    std::map<SubjectId, FaultWindow> faults_;
    SatelliteStore store_;
    std::map<AnchorId, CommittedBatch> batches_;
    std::vector<Assignment> last_assignments_;
    std::map<SubjectId, KpiMap> latest_kpis_;
    std::map<SubjectId, AggregateRecord> latest_aggregates_;
};

/// True iff hash(report_bytes) is the proof's leaf and the path folds to
/// the root anchored under `anchor`.
bool verify_report_bytes(std::string_view report_bytes, const MerkleProof& proof, AnchorId anchor,
                         const Ledger& ledger);
bool verify_report(const PerformanceReport& report, const MerkleProof& proof, AnchorId anchor,
                   const Ledger& ledger);

/// Middle value; for an even count, the mean of the two middle values
/// rounded down.
std::int64_t median(std::vector<std::int64_t> values);

}  // namespace icn
