#pragma once

#include "icn/composition.hpp"
#include "icn/economics.hpp"
#include "icn/enforcement.hpp"
#include "icn/ledger.hpp"
#include "icn/registry.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <string>
#include <vector>

namespace icn {

struct ProtocolConfig {
    EnforcementConfig enforcement;
    SelectionWeights weights;
};

struct SlashRecord {
    FaultEvent fault;
    SlashOutcome outcome;
};

struct ChallengeRound {
    Epoch epoch = 0;
    std::vector<Assignment> assignments;
    std::vector<AggregateOutcome> outcomes;
    std::vector<SlashRecord> fault_slashes;
    std::vector<SlashOutcome> misreport_slashes;
    std::set<NodeId> failed_nodes;
    /// Set when subjects existed but no HyperNode had security.
    bool skipped = false;
};

struct EpochBoundary {
    EpochSummary ledger;
    std::vector<NodeId> suspended;
    std::vector<LockId> released_locks;
};

/// The single-writer protocol state: ledger, hardware registry, resource
/// pool, HyperNode network and economics, plus the cross-module rules that
/// tie them together. Every mutation goes through this object.
class Protocol {
public:
    Protocol(ProtocolConfig config, const std::map<AccountId, TokenAmount>& genesis);

    Epoch now() const noexcept { return ledger_.current_epoch(); }

    // Catalog setup.
    void add_region(RegionEconomy region) { registry_.add_region(std::move(region)); }
    void add_class(HardwareClass hw_class) { registry_.add_class(std::move(hw_class)); }
    void add_blueprint(InstanceBlueprint bp) { pool_.add_blueprint(std::move(bp)); }
    void add_service(Service service) { enforcement_.add_service(std::move(service)); }
    void add_hypernode(HyperNode hn);
    std::string register_challenge_spec(const ChallengeSpec& spec)
    {
        return enforcement_.register_challenge_spec(spec, registry_);
    }

    // Hardware lifecycle.
    const ScalerNode& register_node(const NodeRegistration& reg);
    CollateralLock lock_collateral(const AccountId& owner, const NodeId& node, TokenAmount amount,
                                   Epoch until);
    TokenAmount release_collateral(LockId lock);
    NodeStatus activate(const NodeId& node);
    void retire(const NodeId& node);
    void set_reservation_price(const NodeId& node, TokenAmount price);

    // Tokens and security.
    void transfer(const AccountId& from, const AccountId& to, TokenAmount amount);
    StakePosition stake(const AccountId& staker, const std::string& target, TokenAmount amount);
    NftPass mint_nft(const AccountId& owner, TokenAmount initial_sink, std::uint64_t timelock,
                     std::optional<NftId> id = std::nullopt);
    const NftPass& stake_nft(const NftId& pass, const std::string& target);

    // Resource composition.
    const Instance& deploy(const AccountId& owner, const DeploySpec& spec, Epoch duration,
                           std::optional<InstanceId> id = std::nullopt);
    const Instance& scale(const InstanceId& id, const ResourceType& type, std::int64_t delta);
    CapacityVector release(const InstanceId& id);
    Epoch extend_reservation(const InstanceId& id, Epoch extra,
                             const std::map<NodeId, bool>& provider_accepts);
    Plan quote_price(const DeploySpec& spec, std::optional<RegionId> region, Epoch duration = 1) const;

    void inject_fault(const SubjectId& subject, Ratio multiplier, Epoch duration);

    // Epoch phases, in loop order.
    std::vector<InstanceId> begin_epoch();
    ChallengeRound run_challenges(bool parallel = true);
    SettlementResult settle();
    EpochBoundary end_epoch();

    /// Cross-module invariants that hold in any state reachable through
    /// this API. Returns one message per violation.
    std::vector<std::string> check_state_invariants() const;

    SelectionContext selection_context() const;

    const Ledger& ledger() const noexcept { return ledger_; }
    const HardwareRegistry& registry() const noexcept { return registry_; }
    const ResourcePool& pool() const noexcept { return pool_; }
    const PerformanceEnforcement& enforcement() const noexcept { return enforcement_; }
    const Economics& economics() const noexcept { return economics_; }
    const ProtocolConfig& config() const noexcept { return config_; }
    const std::set<NodeId>& failed_this_epoch() const noexcept { return failed_; }

    /// Canonical JSON snapshot (sorted keys, integers as decimal strings).
    nlohmann::json snapshot() const;
    static Protocol restore(const nlohmann::json& snapshot);

private:
    Protocol() = default;
    bool is_hypernode(const std::string& id) const
    {
        return enforcement_.hypernodes().contains(id);
    }
    void require_stake_target(const std::string& target) const;

    ProtocolConfig config_;
    Ledger ledger_;
    HardwareRegistry registry_;
    ResourcePool pool_;
    PerformanceEnforcement enforcement_;
    Economics economics_;
    std::set<NodeId> failed_;
};

}  // namespace icn
