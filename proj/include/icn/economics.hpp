#pragma once

#include "icn/composition.hpp"
#include "icn/ledger.hpp"
#include "icn/registry.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace icn {

enum class RewardSource { Bootstrap, AccessFee };

std::string_view source_name(RewardSource source) noexcept;

struct RewardStatement {
    Epoch epoch = 0;
    NodeId node;
    RewardSource source = RewardSource::AccessFee;
    TokenAmount gross;
    TokenAmount provider_cut;
    std::map<AccountId, TokenAmount> staker_cuts;

    TokenAmount staker_total() const;
};

struct SettlementResult {
    Epoch epoch = 0;
    std::vector<RewardStatement> statements;
    BillingResult billing;
    /// Everything paid into escrow for this epoch.
    TokenAmount fees_charged;
    /// Fees owed to failed nodes, burned instead of paid.
    TokenAmount fees_burned;
    TokenAmount bootstrap_emitted;
    /// Emission withheld from failed nodes.
    TokenAmount bootstrap_withheld;
};

struct StakerWeight {
    AccountId account;
    TokenAmount weight;
};

/// Stakers of `node` with their weights: token stakes plus the staked NFT
/// sink, at face value, merged per account.
std::vector<StakerWeight> staker_weights(const NodeId& node, const Ledger& ledger);

/// provider = floor(share * gross); the remainder is split pro-rata over
/// staker weights, floor each, with any rounding dust going to the provider.
RewardStatement split_reward(Epoch epoch, const NodeId& node, RewardSource source,
                             TokenAmount gross, const Ratio& rewards_share,
                             const std::vector<StakerWeight>& stakers);

/// Bootstrap emission owed to each Active node of `region` for one epoch.
/// Emission is split equally across the resource types named in the target;
/// within a type, node i earns floor(E_t * c_i / max(sum c, target_t)).
std::map<NodeId, TokenAmount> bootstrap_allocation(const RegionEconomy& region,
                                                   const HardwareRegistry& registry);

/// Regional emission and fee settlement, run once per epoch in order.
class Economics {
public:
    Epoch next_epoch() const noexcept { return next_epoch_; }

    /// `failed` lists nodes whose aggregated verdict failed this epoch.
    SettlementResult settle_epoch(Epoch epoch, const std::set<NodeId>& failed,
                                  HardwareRegistry& registry, ResourcePool& pool, Ledger& ledger);

    Plan quote_price(const ResourcePool& pool, const DeploySpec& spec, std::optional<RegionId> region,
                     Epoch duration, const SelectionContext& ctx) const;

    void restore(Epoch next_epoch) { next_epoch_ = next_epoch; }

private:
    Epoch next_epoch_ = 0;
};

}  // namespace icn
