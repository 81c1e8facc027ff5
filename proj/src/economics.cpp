#include "icn/economics.hpp"

#include <algorithm>

namespace icn {

namespace {

bool type_matches(const ResourceType& target, const ResourceType& offered)
{
    if (target.kind != offered.kind)
        return false;
    return target.subclass.empty() || target.subclass == offered.subclass;
}

void pay_out(const RewardStatement& st, const AccountId& provider, Ledger& ledger,
             const std::optional<AccountId>& from)
{
    auto credit = [&](const AccountId& to, TokenAmount amount) {
        if (amount.is_zero())
            return;
        if (from)
            ledger.transfer(*from, to, amount);
        else
            ledger.emit(to, amount);
    };
    credit(provider, st.provider_cut);
    for (const auto& [staker, cut] : st.staker_cuts)
        credit(staker, cut);
}

}  // namespace

std::string_view source_name(RewardSource source) noexcept
{
    return source == RewardSource::Bootstrap ? "Bootstrap" : "AccessFee";
}

TokenAmount RewardStatement::staker_total() const
{
    TokenAmount total;
    for (const auto& [staker, cut] : staker_cuts)
        total += cut;
    return total;
}

std::vector<StakerWeight> staker_weights(const NodeId& node, const Ledger& ledger)
{
    std::map<AccountId, TokenAmount> merged;
    for (const auto& [id, pos] : ledger.stakes())
        if (pos.node == node && !pos.amount.is_zero())
            merged[pos.staker] += pos.amount;
    if (auto nft = ledger.staked_nft(node)) {
        const auto& pass = ledger.nft(*nft);
        if (!pass.sink_value.is_zero())
            merged[pass.owner] += pass.sink_value;
    }
    std::vector<StakerWeight> out;
    for (const auto& [account, weight] : merged)
        out.push_back({account, weight});
    return out;
}

RewardStatement split_reward(Epoch epoch, const NodeId& node, RewardSource source,
                             TokenAmount gross, const Ratio& rewards_share,
                             const std::vector<StakerWeight>& stakers)
{
    RewardStatement st;
    st.epoch = epoch;
    st.node = node;
    st.source = source;
    st.gross = gross;

    TokenAmount total_weight;
    for (const auto& s : stakers)
        total_weight += s.weight;
    if (total_weight.is_zero()) {
        st.provider_cut = gross;
        return st;
    }

    TokenAmount provider(rewards_share.floor_mul(gross.value()));
    TokenAmount remainder = gross - provider;
    TokenAmount distributed;
    for (const auto& s : stakers) {
        TokenAmount cut(Ratio(s.weight.value(), total_weight.value()).floor_mul(remainder.value()));
        if (cut.is_zero())
            continue;
        st.staker_cuts[s.account] += cut;
        distributed += cut;
    }
    st.provider_cut = provider + (remainder - distributed);
    return st;
}

std::map<NodeId, TokenAmount> bootstrap_allocation(const RegionEconomy& region,
                                                   const HardwareRegistry& registry)
{
    std::map<NodeId, TokenAmount> out;
    std::vector<std::pair<ResourceType, std::uint64_t>> targets;
    for (const auto& [type, target] : region.target_capacity)
        if (target > 0)
            targets.emplace_back(type, target);
    if (targets.empty() || region.bootstrap_emission_per_epoch.is_zero())
        return out;

    std::uint64_t per_type = region.bootstrap_emission_per_epoch.value() / targets.size();
    for (const auto& [type, target] : targets) {
        std::map<NodeId, std::uint64_t> committed;
        std::uint64_t total = 0;
        for (const auto& [id, node] : registry.nodes()) {
            if (node.region != region.id || node.status != NodeStatus::Active)
                continue;
            for (const auto& [offered, qty] : node.capacity) {
                if (!type_matches(type, offered) || qty == 0)
                    continue;
                committed[id] += qty;
                total += qty;
            }
        }
        std::uint64_t denom = std::max(total, target);
        for (const auto& [id, qty] : committed) {
            TokenAmount share(Ratio(qty, denom).floor_mul(per_type));
            if (!share.is_zero())
                out[id] += share;
        }
    }
    return out;
}

SettlementResult Economics::settle_epoch(Epoch epoch, const std::set<NodeId>& failed,
                                         HardwareRegistry& registry, ResourcePool& pool,
                                         Ledger& ledger)
{
    if (epoch != next_epoch_)
        fail(Errc::SettlementOutOfOrder,
             "expected epoch " + std::to_string(next_epoch_) + ", got " + std::to_string(epoch));

    SettlementResult result;
    result.epoch = epoch;
    result.billing = pool.bill(epoch, registry, ledger);

    const AccountId escrow = ResourcePool::kEscrowAccount;
    for (const auto& [node_id, amount] : pool.take_accruals(epoch)) {
        result.fees_charged += amount;
        if (amount.is_zero())
            continue;
        if (failed.contains(node_id)) {
            ledger.burn(escrow, amount);
            result.fees_burned += amount;
            continue;
        }
        const auto& node = registry.node(node_id);
        auto st = split_reward(epoch, node_id, RewardSource::AccessFee, amount, node.rewards_share,
                               staker_weights(node_id, ledger));
        pay_out(st, node.provider, ledger, escrow);
        result.statements.push_back(std::move(st));
    }

    for (const auto& [region_id, region] : registry.regions()) {
        if (epoch >= region.bootstrap_end)
            continue;
        for (const auto& [node_id, amount] : bootstrap_allocation(region, registry)) {
            if (failed.contains(node_id)) {
                result.bootstrap_withheld += amount;
                continue;
            }
            const auto& node = registry.node(node_id);
            auto st = split_reward(epoch, node_id, RewardSource::Bootstrap, amount,
                                   node.rewards_share, staker_weights(node_id, ledger));
            pay_out(st, node.provider, ledger, std::nullopt);
            result.bootstrap_emitted += amount;
            result.statements.push_back(std::move(st));
        }
    }

    std::stable_sort(result.statements.begin(), result.statements.end(),
                     [](const RewardStatement& a, const RewardStatement& b) {
                         return std::tie(a.node, a.source) < std::tie(b.node, b.source);
                     });
    ++next_epoch_;
    return result;
}

Plan Economics::quote_price(const ResourcePool& pool, const DeploySpec& spec,
                            std::optional<RegionId> region, Epoch duration,
                            const SelectionContext& ctx) const
{
    return pool.quote(spec, region, duration, ctx);
}

}  // namespace icn
