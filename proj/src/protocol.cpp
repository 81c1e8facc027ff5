#include "icn/protocol.hpp"

#include "icn/json_io.hpp"

namespace icn {

namespace jio = json_io;
using nlohmann::json;

Protocol::Protocol(ProtocolConfig config, const std::map<AccountId, TokenAmount>& genesis)
    : config_(config), ledger_(genesis), enforcement_(config.enforcement)
{
}

void Protocol::add_hypernode(HyperNode hn)
{
    if (registry_.has_node(hn.id))
        fail(Errc::DuplicateId, hn.id + " is already a ScalerNode");
    enforcement_.add_hypernode(std::move(hn), ledger_);
}

const ScalerNode& Protocol::register_node(const NodeRegistration& reg)
{
    if (is_hypernode(reg.id))
        fail(Errc::DuplicateId, reg.id + " is already a HyperNode");
    if (!ledger_.has_account(reg.provider))
        fail(Errc::UnknownAccount, reg.provider);
    return registry_.register_node(reg, now());
}

CollateralLock Protocol::lock_collateral(const AccountId& owner, const NodeId& node,
                                         TokenAmount amount, Epoch until)
{
    const auto& n = registry_.node(node);
    if (n.status == NodeStatus::Retired)
        fail(Errc::InvalidTransition, node + " is retired");
    return ledger_.lock_collateral(owner, node, amount, until);
}

TokenAmount Protocol::release_collateral(LockId lock_id)
{
    auto it = ledger_.locks().find(lock_id);
    if (it == ledger_.locks().end())
        fail(Errc::UnknownLock, std::to_string(lock_id));
    const auto& lock = it->second;
    if (registry_.has_node(lock.node)) {
        const auto& n = registry_.node(lock.node);
        if (n.status == NodeStatus::Active
            && ledger_.collateral_of(lock.node) - lock.amount < registry_.min_collateral(lock.node))
            fail(Errc::InsufficientCollateral, "release would leave " + lock.node + " under-collateralized");
    }
    return ledger_.release_collateral(lock_id);
}

NodeStatus Protocol::activate(const NodeId& node)
{
    bool locked = false;
    for (const auto& [id, lock] : ledger_.locks())
        locked = locked || lock.node == node;
    if (!locked && registry_.node(node).status != NodeStatus::Active)
        fail(Errc::InsufficientCollateral, node + " has no collateral lock");
    return registry_.activate(node, ledger_.collateral_of(node));
}

void Protocol::retire(const NodeId& node)
{
    registry_.retire(node, now());
    std::vector<LockId> releasable;
    for (const auto& [id, lock] : ledger_.locks())
        if (lock.node == node && lock.locked_until <= now())
            releasable.push_back(id);
    for (auto id : releasable)
        ledger_.release_collateral(id);
    ledger_.unstake_all(node);
}

void Protocol::set_reservation_price(const NodeId& node, TokenAmount price)
{
    registry_.set_reservation_price(node, price);
}

void Protocol::transfer(const AccountId& from, const AccountId& to, TokenAmount amount)
{
    ledger_.open_account(to);
    ledger_.transfer(from, to, amount);
}

void Protocol::require_stake_target(const std::string& target) const
{
    if (is_hypernode(target))
        return;
    if (registry_.node(target).status != NodeStatus::Active)
        fail(Errc::NodeInactive, target);
}

StakePosition Protocol::stake(const AccountId& staker, const std::string& target, TokenAmount amount)
{
    require_stake_target(target);
    return ledger_.stake(staker, target, amount);
}

NftPass Protocol::mint_nft(const AccountId& owner, TokenAmount initial_sink, std::uint64_t timelock,
                           std::optional<NftId> id)
{
    return ledger_.mint_nft(owner, initial_sink, timelock, std::move(id));
}

const NftPass& Protocol::stake_nft(const NftId& pass, const std::string& target)
{
    require_stake_target(target);
    return ledger_.stake_nft(pass, target);
}

SelectionContext Protocol::selection_context() const
{
    return SelectionContext{registry_, enforcement_.latest_kpis(), config_.weights, now()};
}

const Instance& Protocol::deploy(const AccountId& owner, const DeploySpec& spec, Epoch duration,
                                 std::optional<InstanceId> id)
{
    return pool_.deploy(owner, spec, duration, selection_context(), registry_, ledger_, std::move(id));
}

const Instance& Protocol::scale(const InstanceId& id, const ResourceType& type, std::int64_t delta)
{
    return pool_.scale(id, type, delta, selection_context(), registry_);
}

CapacityVector Protocol::release(const InstanceId& id)
{
    return pool_.release(id, now(), registry_, ledger_);
}

Epoch Protocol::extend_reservation(const InstanceId& id, Epoch extra,
                                   const std::map<NodeId, bool>& provider_accepts)
{
    return pool_.extend_reservation(id, extra, provider_accepts, registry_);
}

Plan Protocol::quote_price(const DeploySpec& spec, std::optional<RegionId> region, Epoch duration) const
{
    return economics_.quote_price(pool_, spec, region, duration, selection_context());
}

void Protocol::inject_fault(const SubjectId& subject, Ratio multiplier, Epoch duration)
{
    if (!registry_.has_node(subject) && !enforcement_.services().contains(subject))
        fail(Errc::UnknownSubject, subject);
    if (duration == 0)
        fail(Errc::InvalidDuration, "fault duration must be positive");
    enforcement_.inject_fault(subject, multiplier, now(), duration);
}

std::vector<InstanceId> Protocol::begin_epoch()
{
    failed_.clear();
    return pool_.expire(now(), registry_);
}

ChallengeRound Protocol::run_challenges(bool parallel)
{
    ChallengeRound round;
    round.epoch = now();
    failed_.clear();
    try {
        round.outcomes = enforcement_.run_round(now(), registry_, ledger_, parallel);
    } catch (const ProtocolError& e) {
        if (e.code() != Errc::NoEligibleHyperNodes)
            throw;
        round.skipped = true;
        return round;
    }
    round.assignments = enforcement_.last_assignments();
    const auto& rate = enforcement_.config().challenger_slash_rate;
    for (const auto& outcome : round.outcomes) {
        if (outcome.fault) {
            const auto& fault = *outcome.fault;
            round.fault_slashes.push_back({fault, ledger_.slash(fault.node, fault.severity)});
            round.failed_nodes.insert(fault.node);
        }
        if (rate.is_zero())
            continue;
        for (const auto& hn : outcome.misreporters)
            if (ledger_.has_positions(hn))
                round.misreport_slashes.push_back(ledger_.slash(hn, rate));
    }
    failed_ = round.failed_nodes;
    return round;
}

SettlementResult Protocol::settle()
{
    return economics_.settle_epoch(now(), failed_, registry_, pool_, ledger_);
}

EpochBoundary Protocol::end_epoch()
{
    EpochBoundary out;
    out.ledger = ledger_.advance_epoch();
    for (const auto& [id, node] : registry_.nodes())
        if (node.status == NodeStatus::Active
            && ledger_.collateral_of(id) < registry_.min_collateral(id))
            out.suspended.push_back(id);
    for (const auto& id : out.suspended)
        registry_.suspend(id);

    std::vector<LockId> releasable;
    for (const auto& [id, lock] : ledger_.locks())
        if (lock.locked_until <= now() && registry_.has_node(lock.node)
            && registry_.node(lock.node).status == NodeStatus::Retired)
            releasable.push_back(id);
    for (auto id : releasable) {
        ledger_.release_collateral(id);
        out.released_locks.push_back(id);
    }
    enforcement_.evict(now());
    return out;
}

std::vector<std::string> Protocol::check_state_invariants() const
{
    std::vector<std::string> out;
    if (!ledger_.conservation_holds())
        out.push_back("ledger conservation: accounted " + ledger_.accounted_total().to_string()
                      + " != genesis " + ledger_.genesis_supply().to_string() + " + emitted "
                      + ledger_.emitted_total().to_string());

    std::map<std::pair<NodeId, ResourceType>, std::uint64_t> used;
    for (const auto& [id, inst] : pool_.instances()) {
        for (const auto& u : inst.allocations) {
            used[{u.node, u.type}] += u.quantity;
            const auto& node = registry_.node(u.node);
            const auto& req = inst.requirements.at(u.requirement);
            if (u.region != node.region || (!req.locality.empty() && !req.locality.contains(u.region)))
                out.push_back("locality soundness: " + id + " holds " + u.type.to_string() + " on "
                              + u.node + " in " + node.region);
        }
    }
    for (const auto& [id, node] : registry_.nodes()) {
        for (const auto& [type, cap] : node.capacity) {
            auto it = used.find({id, type});
            std::uint64_t live = it == used.end() ? 0 : it->second;
            auto alloc = node.allocated.find(type);
            std::uint64_t booked = alloc == node.allocated.end() ? 0 : alloc->second;
            if (live > cap)
                out.push_back("double allocation: " + id + " " + type.to_string() + " "
                              + std::to_string(live) + " > " + std::to_string(cap));
            if (live != booked)
                out.push_back("allocation ledger mismatch on " + id + " " + type.to_string());
        }
        if (node.status == NodeStatus::Active
            && ledger_.collateral_of(id) < registry_.min_collateral(id))
            out.push_back("active node " + id + " below minimum collateral");
    }
    for (const auto& [key, qty] : used)
        if (!registry_.node(key.first).capacity.contains(key.second))
            out.push_back("allocation of absent type on " + key.first);
    return out;
}

json Protocol::snapshot() const
{
    json doc;
    doc["format"] = "icn-state/1";
    doc["weights"] = {{"perf", jio::ratio(config_.weights.perf)},
                      {"price", jio::ratio(config_.weights.price)},
                      {"avail", jio::ratio(config_.weights.avail)}};
    doc["ledger"] = ledger_.to_json();
    doc["registry"] = registry_.to_json();
    doc["pool"] = pool_.to_json();
    doc["enforcement"] = enforcement_.to_json();
    doc["economics"] = {{"next_epoch", jio::u64(economics_.next_epoch())}};
    doc["failed_this_epoch"] = std::vector<std::string>(failed_.begin(), failed_.end());
    return doc;
}

Protocol Protocol::restore(const json& doc)
{
    if (doc.value("format", "") != "icn-state/1")
        fail(Errc::ParseError, "not an icn-state/1 snapshot");
    Protocol p;
    const auto& w = doc.at("weights");
    p.config_.weights = {jio::read_ratio(w.at("perf")), jio::read_ratio(w.at("price")),
                         jio::read_ratio(w.at("avail"))};
    p.ledger_ = Ledger::from_json(doc.at("ledger"));
    p.registry_ = HardwareRegistry::from_json(doc.at("registry"));
    p.pool_ = ResourcePool::from_json(doc.at("pool"));
    p.enforcement_ = PerformanceEnforcement::from_json(doc.at("enforcement"));
    p.config_.enforcement = p.enforcement_.config();
    p.economics_.restore(jio::read_u64(doc.at("economics").at("next_epoch")));
    for (const auto& id : doc.at("failed_this_epoch"))
        p.failed_.insert(id.get<std::string>());
    return p;
}

}  // namespace icn
