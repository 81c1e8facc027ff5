#pragma once

#include "icn/ledger.hpp"
#include "icn/registry.hpp"
#include "icn/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace icn {

struct Requirement {
    ResourceType type;
    std::uint64_t quantity = 0;
    /// Empty means unconstrained.
    std::set<RegionId> locality;
    /// Minimum aggregated KPI medians (milli-units) a candidate must show.
    KpiMap min_kpi;
};

struct ElasticBounds {
    Ratio min_factor = Ratio::one();
    Ratio max_factor = Ratio::one();
};

struct InstanceBlueprint {
    std::string id;
    std::vector<Requirement> requirements;
    std::optional<ElasticBounds> elastic;
    std::vector<std::string> services;
};

/// A typed slice of one node's capacity held by an instance.
struct ResourceUnit {
    NodeId node;
    ResourceType type;
    std::uint64_t quantity = 0;
    RegionId region;
    /// Index of the requirement this unit satisfies.
    std::size_t requirement = 0;
};

struct Instance {
    InstanceId id;
    AccountId owner;
    std::string blueprint = "custom";
    std::vector<Requirement> requirements;
    std::vector<ResourceUnit> allocations;
    std::optional<ElasticBounds> elastic;
    std::vector<std::string> services;
    Epoch booked_at = 0;
    Epoch booked_until = 0;
    std::map<ResourceType, TokenAmount> fixed_unit_prices;
    std::optional<Epoch> paid_through;

    std::uint64_t allocated(const ResourceType& type) const;
    TokenAmount per_epoch_fee() const;
    /// Fee owed by the instance per backing node, proportional to units supplied.
    std::map<NodeId, TokenAmount> fee_by_node() const;
};

struct SelectionWeights {
    Ratio perf = Ratio::one();
    Ratio price = Ratio::one();
    Ratio avail = Ratio::one();
};

/// Component scores are in parts per million of [0,1].
struct CandidateScore {
    NodeId node;
    std::uint64_t perf_ppm = 0;
    std::uint64_t price_ppm = 0;
    std::uint64_t avail_ppm = 0;
    std::uint64_t free = 0;
    Ratio score;
};

struct SelectionContext {
    const HardwareRegistry& registry;
    const std::map<NodeId, KpiMap>& latest_kpis;
    SelectionWeights weights;
    Epoch now = 0;
};

/// Mean over the class profile of min(1, median / nominal); 0 without a report.
std::uint64_t perf_score_ppm(const HardwareClass& cls, const KpiMap* medians);

/// Candidates for one requirement, best first (score desc, node id asc).
/// `pending` holds quantities already claimed by the plan under construction.
std::vector<CandidateScore> rank_candidates(const Requirement& req, Epoch duration,
                                            const SelectionContext& ctx,
                                            const std::map<std::pair<NodeId, ResourceType>,
                                                           std::uint64_t>& pending = {});

struct Plan {
    std::vector<ResourceUnit> allocations;
    std::map<ResourceType, TokenAmount> unit_prices;
    TokenAmount per_epoch_fee;
};

/// Greedy score-ordered fill of every requirement. Pure.
Plan plan_allocation(const std::vector<Requirement>& requirements, Epoch duration,
                     const SelectionContext& ctx);

using DeploySpec = std::variant<std::string, std::vector<Requirement>>;

struct BillingResult {
    std::vector<InstanceId> charged;
    /// Instances whose owner could not pay; they were released.
    std::vector<InstanceId> defaulted;
};

/// Global pool of composed instances. Allocation bookkeeping lives in the
/// registry (per-node allocated vectors); this class owns instance records
/// and the per-epoch fee accruals awaiting settlement.
class ResourcePool {
public:
    static constexpr const char* kEscrowAccount = "icn:escrow";

    void add_blueprint(InstanceBlueprint blueprint);
    const InstanceBlueprint& blueprint(const std::string& id) const;
    const std::map<std::string, InstanceBlueprint>& blueprints() const noexcept
    {
        return blueprints_;
    }

    std::vector<Requirement> resolve(const DeploySpec& spec) const;

    /// What deploy() would lock in right now, restricted to `region` when given.
    Plan quote(const DeploySpec& spec, std::optional<RegionId> region, Epoch duration,
               const SelectionContext& ctx) const;

    const Instance& deploy(const AccountId& owner, const DeploySpec& spec, Epoch duration,
                           const SelectionContext& ctx, HardwareRegistry& registry, Ledger& ledger,
                           std::optional<InstanceId> id = std::nullopt);
    const Instance& scale(const InstanceId& id, const ResourceType& type, std::int64_t delta,
                          const SelectionContext& ctx, HardwareRegistry& registry);
    /// Charges the current epoch if unpaid, then frees every unit.
    CapacityVector release(const InstanceId& id, Epoch now, HardwareRegistry& registry,
                           Ledger& ledger);
    Epoch extend_reservation(const InstanceId& id, Epoch extra,
                             const std::map<NodeId, bool>& provider_accepts,
                             const HardwareRegistry& registry);

    /// Releases instances whose booking ended (booked_until <= now) without charge.
    std::vector<InstanceId> expire(Epoch now, HardwareRegistry& registry);
    /// Charges every live instance not yet billed for `now`.
    BillingResult bill(Epoch now, HardwareRegistry& registry, Ledger& ledger);

    /// Fees collected for `epoch`, keyed by backing node; removes them.
    std::map<NodeId, TokenAmount> take_accruals(Epoch epoch);
    const std::map<Epoch, std::map<NodeId, TokenAmount>>& accruals() const noexcept
    {
        return accruals_;
    }

    bool has_instance(const InstanceId& id) const { return instances_.contains(id); }
    const Instance& instance(const InstanceId& id) const;
    const std::map<InstanceId, Instance>& instances() const noexcept { return instances_; }

    nlohmann::json to_json() const;
    static ResourcePool from_json(const nlohmann::json& doc);

private:
    bool charge(Instance& inst, Epoch now, Ledger& ledger);
    void free_units(const Instance& inst, HardwareRegistry& registry);

    std::map<std::string, InstanceBlueprint> blueprints_;
    std::map<InstanceId, Instance> instances_;
    std::map<Epoch, std::map<NodeId, TokenAmount>> accruals_;
    std::uint64_t next_instance_ = 1;
};

nlohmann::json requirement_to_json(const Requirement& req);
Requirement requirement_from_json(const nlohmann::json& doc);

}  // namespace icn
