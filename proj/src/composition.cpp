#include "icn/composition.hpp"

#include "icn/json_io.hpp"

#include <algorithm>

namespace icn {

namespace jio = json_io;
using nlohmann::json;

namespace {

constexpr std::uint64_t kPpm = 1'000'000;

using Pending = std::map<std::pair<NodeId, ResourceType>, std::uint64_t>;

struct FilterStats {
    std::size_t base = 0;
    std::size_t after_locality = 0;
    std::size_t after_kpi = 0;
};

bool meets_min_kpi(const Requirement& req, const KpiMap* medians)
{
    for (const auto& [kpi, threshold] : req.min_kpi) {
        std::int64_t value = 0;
        if (medians)
            if (auto it = medians->find(kpi); it != medians->end())
                value = it->second;
        if (value < threshold)
            return false;
    }
    return true;
}

std::vector<CandidateScore> filter_and_score(const Requirement& req, Epoch duration,
                                             const SelectionContext& ctx, const Pending& pending,
                                             FilterStats& stats)
{
    std::vector<CandidateScore> out;
    for (const auto& [id, node] : ctx.registry.nodes()) {
        if (node.status != NodeStatus::Active || !node.capacity.contains(req.type)
            || node.max_booking_duration < duration)
            continue;
        ++stats.base;
        if (!req.locality.empty() && !req.locality.contains(node.region))
            continue;
        ++stats.after_locality;
        const KpiMap* medians = nullptr;
        if (auto it = ctx.latest_kpis.find(id); it != ctx.latest_kpis.end())
            medians = &it->second;
        if (!meets_min_kpi(req, medians))
            continue;
        ++stats.after_kpi;
        std::uint64_t free = node.free(req.type);
        if (auto it = pending.find({id, req.type}); it != pending.end())
            free -= std::min(free, it->second);
        if (free == 0)
            continue;
        CandidateScore c;
        c.node = id;
        c.free = free;
        c.perf_ppm = perf_score_ppm(ctx.registry.hardware_class(node.hardware_class), medians);
        c.avail_ppm = free * kPpm / node.capacity.at(req.type);
        out.push_back(std::move(c));
    }
    if (out.empty())
        return out;

    std::uint64_t min_price = UINT64_MAX;
    for (const auto& c : out)
        min_price = std::min(min_price, ctx.registry.node(c.node).reservation_price.value());
    for (auto& c : out) {
        std::uint64_t price = ctx.registry.node(c.node).reservation_price.value();
        c.price_ppm = price == 0 ? kPpm : Ratio(min_price, price).floor_mul(kPpm);
        c.score = ctx.weights.perf * Ratio::integer(c.perf_ppm)
                  + ctx.weights.price * Ratio::integer(c.price_ppm)
                  + ctx.weights.avail * Ratio::integer(c.avail_ppm);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.node < b.node;
    });
    return out;
}

void validate(const std::vector<Requirement>& reqs)
{
    if (reqs.empty())
        fail(Errc::InvalidParameters, "no requirements");
    for (const auto& r : reqs)
        if (r.quantity == 0)
            fail(Errc::InvalidParameters, "requirement quantity must be positive");
}

std::vector<ResourceUnit> fill(const Requirement& req, std::size_t index, Epoch duration,
                               const SelectionContext& ctx, Pending& pending)
{
    FilterStats stats;
    auto ranked = filter_and_score(req, duration, ctx, pending, stats);
    if (stats.base == 0)
        fail(Errc::InsufficientCapacity, "no active node offers " + req.type.to_string());
    if (stats.after_locality == 0)
        fail(Errc::LocalityUnsatisfiable, req.type.to_string());
    if (stats.after_kpi == 0)
        fail(Errc::KpiUnsatisfiable, req.type.to_string());

    std::uint64_t remaining = req.quantity;
    std::vector<ResourceUnit> units;
    for (const auto& c : ranked) {
        if (remaining == 0)
            break;
        std::uint64_t take = std::min(remaining, c.free);
        units.push_back({c.node, req.type, take, ctx.registry.node(c.node).region, index});
        pending[{c.node, req.type}] += take;
        remaining -= take;
    }
    if (remaining != 0)
        fail(Errc::InsufficientCapacity,
             req.type.to_string() + " short by " + std::to_string(remaining));
    return units;
}

}  // namespace

std::uint64_t Instance::allocated(const ResourceType& type) const
{
    std::uint64_t total = 0;
    for (const auto& u : allocations)
        if (u.type == type)
            total += u.quantity;
    return total;
}

TokenAmount Instance::per_epoch_fee() const
{
    TokenAmount total;
    for (const auto& u : allocations)
        total += fixed_unit_prices.at(u.type).times(u.quantity);
    return total;
}

std::map<NodeId, TokenAmount> Instance::fee_by_node() const
{
    std::map<NodeId, TokenAmount> out;
    for (const auto& u : allocations)
        out[u.node] += fixed_unit_prices.at(u.type).times(u.quantity);
    return out;
}

std::uint64_t perf_score_ppm(const HardwareClass& cls, const KpiMap* medians)
{
    if (!medians || cls.performance_profile.empty())
        return 0;
    std::uint64_t sum = 0;
    for (const auto& [kpi, nominal] : cls.performance_profile) {
        auto it = medians->find(kpi);
        if (it == medians->end() || it->second <= 0 || nominal <= 0)
            continue;
        auto measured = static_cast<std::uint64_t>(it->second);
        auto nom = static_cast<std::uint64_t>(nominal);
        sum += measured >= nom ? kPpm : Ratio(measured, nom).floor_mul(kPpm);
    }
    return sum / cls.performance_profile.size();
}

std::vector<CandidateScore> rank_candidates(const Requirement& req, Epoch duration,
                                            const SelectionContext& ctx, const Pending& pending)
{
    FilterStats stats;
    return filter_and_score(req, duration, ctx, pending, stats);
}

Plan plan_allocation(const std::vector<Requirement>& requirements, Epoch duration,
                     const SelectionContext& ctx)
{
    validate(requirements);
    if (duration == 0)
        fail(Errc::InvalidDuration, "booking duration must be positive");
    Plan plan;
    Pending pending;
    for (std::size_t i = 0; i < requirements.size(); ++i) {
        auto units = fill(requirements[i], i, duration, ctx, pending);
        plan.allocations.insert(plan.allocations.end(), units.begin(), units.end());
    }
    for (const auto& u : plan.allocations) {
        auto price = ctx.registry.node(u.node).reservation_price;
        auto& slot = plan.unit_prices[u.type];
        slot = std::max(slot, price);
    }
    for (const auto& u : plan.allocations)
        plan.per_epoch_fee += plan.unit_prices.at(u.type).times(u.quantity);
    return plan;
}

void ResourcePool::add_blueprint(InstanceBlueprint bp)
{
    if (blueprints_.contains(bp.id))
        fail(Errc::DuplicateId, bp.id);
    validate(bp.requirements);
    if (bp.elastic) {
        const auto& e = *bp.elastic;
        if (e.min_factor.is_zero() || e.min_factor > Ratio::one() || e.max_factor < Ratio::one())
            fail(Errc::InvalidParameters, "elastic bounds must satisfy 0 < min <= 1 <= max");
    }
    blueprints_.emplace(bp.id, std::move(bp));
}

const InstanceBlueprint& ResourcePool::blueprint(const std::string& id) const
{
    auto it = blueprints_.find(id);
    if (it == blueprints_.end())
        fail(Errc::UnknownBlueprint, id);
    return it->second;
}

std::vector<Requirement> ResourcePool::resolve(const DeploySpec& spec) const
{
    if (const auto* id = std::get_if<std::string>(&spec))
        return blueprint(*id).requirements;
    return std::get<std::vector<Requirement>>(spec);
}

Plan ResourcePool::quote(const DeploySpec& spec, std::optional<RegionId> region, Epoch duration,
                         const SelectionContext& ctx) const
{
    auto reqs = resolve(spec);
    if (region) {
        ctx.registry.region(*region);
        for (auto& r : reqs)
            r.locality = {*region};
    }
    try {
        return plan_allocation(reqs, duration, ctx);
    } catch (const ProtocolError& e) {
        if (e.code() == Errc::LocalityUnsatisfiable)
            fail(Errc::InsufficientCapacity, e.what());
        throw;
    }
}

const Instance& ResourcePool::deploy(const AccountId& owner, const DeploySpec& spec,
                                     Epoch duration, const SelectionContext& ctx,
                                     HardwareRegistry& registry, Ledger& ledger,
                                     std::optional<InstanceId> id)
{
    auto reqs = resolve(spec);
    InstanceId inst_id = id ? *id : "inst-" + std::to_string(next_instance_);
    if (instances_.contains(inst_id))
        fail(Errc::DuplicateId, inst_id);
    Plan plan = plan_allocation(reqs, duration, ctx);
    if (ledger.balance(owner) < plan.per_epoch_fee)
        fail(Errc::InsufficientBalance, owner);

    Instance inst;
    inst.id = inst_id;
    inst.owner = owner;
    inst.requirements = reqs;
    inst.allocations = plan.allocations;
    inst.booked_at = ctx.now;
    inst.booked_until = ctx.now + duration;
    inst.fixed_unit_prices = plan.unit_prices;
    if (const auto* bp_id = std::get_if<std::string>(&spec)) {
        const auto& bp = blueprint(*bp_id);
        inst.blueprint = bp.id;
        inst.elastic = bp.elastic;
        inst.services = bp.services;
    }
    for (const auto& u : inst.allocations)
        registry.allocate(u.node, u.type, u.quantity);
    charge(inst, ctx.now, ledger);
    ++next_instance_;
    return instances_.emplace(inst_id, std::move(inst)).first->second;
}

const Instance& ResourcePool::scale(const InstanceId& id, const ResourceType& type,
                                    std::int64_t delta, const SelectionContext& ctx,
                                    HardwareRegistry& registry)
{
    auto it = instances_.find(id);
    if (it == instances_.end())
        fail(Errc::UnknownInstance, id);
    auto& inst = it->second;
    if (!inst.elastic)
        fail(Errc::NotElastic, id);

    std::uint64_t base = 0;
    std::optional<std::size_t> req_index;
    for (std::size_t i = 0; i < inst.requirements.size(); ++i) {
        if (inst.requirements[i].type != type)
            continue;
        base += inst.requirements[i].quantity;
        if (!req_index)
            req_index = i;
    }
    if (!req_index)
        fail(Errc::InvalidParameters, id + " has no " + type.to_string() + " requirement");

    using i128 = __int128;
    std::uint64_t current = inst.allocated(type);
    i128 target = static_cast<i128>(current) + delta;
    const auto& bounds = *inst.elastic;
    if (target < 0 || target * bounds.min_factor.den() < static_cast<i128>(bounds.min_factor.num()) * base
        || target * bounds.max_factor.den() > static_cast<i128>(bounds.max_factor.num()) * base)
        fail(Errc::BoundsExceeded, id + " " + type.to_string() + " -> "
                                       + std::to_string(static_cast<std::int64_t>(target)));
    if (delta == 0)
        return inst;

    if (delta > 0) {
        Requirement req = inst.requirements[*req_index];
        req.quantity = static_cast<std::uint64_t>(delta);
        Epoch remaining = inst.booked_until > ctx.now ? inst.booked_until - ctx.now : 1;
        Pending pending;
        auto units = fill(req, *req_index, remaining, ctx, pending);
        for (const auto& u : units) {
            registry.allocate(u.node, u.type, u.quantity);
            auto same = std::find_if(inst.allocations.begin(), inst.allocations.end(),
                                     [&](const ResourceUnit& a) {
                                         return a.node == u.node && a.type == u.type
                                                && a.requirement == u.requirement;
                                     });
            if (same != inst.allocations.end())
                same->quantity += u.quantity;
            else
                inst.allocations.push_back(u);
        }
        return inst;
    }

    std::uint64_t shrink = static_cast<std::uint64_t>(-delta);
    for (auto a = inst.allocations.rbegin(); a != inst.allocations.rend() && shrink > 0; ++a) {
        if (a->type != type)
            continue;
        std::uint64_t take = std::min(shrink, a->quantity);
        registry.release(a->node, a->type, take);
        a->quantity -= take;
        shrink -= take;
    }
    std::erase_if(inst.allocations, [](const ResourceUnit& u) { return u.quantity == 0; });
    return inst;
}

bool ResourcePool::charge(Instance& inst, Epoch now, Ledger& ledger)
{
    TokenAmount fee = inst.per_epoch_fee();
    if (ledger.balance(inst.owner) < fee)
        return false;
    ledger.open_account(kEscrowAccount);
    ledger.transfer(inst.owner, kEscrowAccount, fee);
    for (const auto& [node, amount] : inst.fee_by_node())
        accruals_[now][node] += amount;
    inst.paid_through = now;
    return true;
}

void ResourcePool::free_units(const Instance& inst, HardwareRegistry& registry)
{
    for (const auto& u : inst.allocations)
        registry.release(u.node, u.type, u.quantity);
}

CapacityVector ResourcePool::release(const InstanceId& id, Epoch now, HardwareRegistry& registry,
                                     Ledger& ledger)
{
    auto it = instances_.find(id);
    if (it == instances_.end())
        fail(Errc::UnknownInstance, id);
    auto& inst = it->second;
    if ((!inst.paid_through || *inst.paid_through < now) && now < inst.booked_until)
        charge(inst, now, ledger);
    CapacityVector freed;
    for (const auto& u : inst.allocations)
        freed[u.type] += u.quantity;
    free_units(inst, registry);
    instances_.erase(it);
    return freed;
}

Epoch ResourcePool::extend_reservation(const InstanceId& id, Epoch extra,
                                       const std::map<NodeId, bool>& provider_accepts,
                                       const HardwareRegistry& registry)
{
    auto it = instances_.find(id);
    if (it == instances_.end())
        fail(Errc::UnknownInstance, id);
    auto& inst = it->second;
    if (extra == 0)
        fail(Errc::InvalidDuration, "extension must be positive");
    Epoch new_until = inst.booked_until + extra;
    std::set<NodeId> backing;
    for (const auto& u : inst.allocations)
        backing.insert(u.node);
    for (const auto& node : backing) {
        auto accept = provider_accepts.find(node);
        if (accept == provider_accepts.end() || !accept->second)
            fail(Errc::ProviderDeclined, node);
    }
    for (const auto& node : backing)
        if (registry.node(node).commitment_end < new_until)
            fail(Errc::CommitmentTooShort, node);
    inst.booked_until = new_until;
    return new_until;
}

std::vector<InstanceId> ResourcePool::expire(Epoch now, HardwareRegistry& registry)
{
    std::vector<InstanceId> out;
    for (auto it = instances_.begin(); it != instances_.end();) {
        if (it->second.booked_until <= now) {
            free_units(it->second, registry);
            out.push_back(it->first);
            it = instances_.erase(it);
        } else {
            ++it;
        }
    }
    return out;
}

BillingResult ResourcePool::bill(Epoch now, HardwareRegistry& registry, Ledger& ledger)
{
    BillingResult result;
    for (auto it = instances_.begin(); it != instances_.end();) {
        auto& inst = it->second;
        if (inst.paid_through && *inst.paid_through >= now) {
            ++it;
            continue;
        }
        if (charge(inst, now, ledger)) {
            result.charged.push_back(it->first);
            ++it;
        } else {
            free_units(inst, registry);
            result.defaulted.push_back(it->first);
            it = instances_.erase(it);
        }
    }
    return result;
}

std::map<NodeId, TokenAmount> ResourcePool::take_accruals(Epoch epoch)
{
    auto node = accruals_.extract(epoch);
    return node.empty() ? std::map<NodeId, TokenAmount>{} : std::move(node.mapped());
}

const Instance& ResourcePool::instance(const InstanceId& id) const
{
    auto it = instances_.find(id);
    if (it == instances_.end())
        fail(Errc::UnknownInstance, id);
    return it->second;
}

json requirement_to_json(const Requirement& req)
{
    json j = {{"type", req.type.to_string()}, {"quantity", jio::u64(req.quantity)}};
    if (!req.locality.empty())
        j["locality"] = std::vector<std::string>(req.locality.begin(), req.locality.end());
    if (!req.min_kpi.empty())
        j["min_kpi"] = jio::kpis(req.min_kpi);
    return j;
}

Requirement requirement_from_json(const json& doc)
{
    Requirement r;
    r.type = ResourceType::parse(doc.at("type").get<std::string>());
    r.quantity = jio::read_u64(doc.at("quantity"));
    if (doc.contains("locality")) {
        for (const auto& region : doc.at("locality"))
            r.locality.insert(region.get<std::string>());
        if (r.locality.empty())
            fail(Errc::InvalidParameters, "locality, if present, must be non-empty");
    }
    if (doc.contains("min_kpi"))
        r.min_kpi = jio::read_kpis(doc.at("min_kpi"));
    return r;
}

namespace {

json elastic_json(const std::optional<ElasticBounds>& e)
{
    if (!e)
        return nullptr;
    return {{"min_factor", jio::ratio(e->min_factor)}, {"max_factor", jio::ratio(e->max_factor)}};
}

std::optional<ElasticBounds> read_elastic(const json& j)
{
    if (j.is_null())
        return std::nullopt;
    return ElasticBounds{jio::read_ratio(j.at("min_factor")), jio::read_ratio(j.at("max_factor"))};
}

}  // namespace

json ResourcePool::to_json() const
{
    json doc;
    doc["next_instance"] = jio::u64(next_instance_);
    json bps = json::array();
    for (const auto& [id, bp] : blueprints_) {
        json reqs = json::array();
        for (const auto& r : bp.requirements)
            reqs.push_back(requirement_to_json(r));
        bps.push_back({{"id", id},
                       {"requirements", reqs},
                       {"elastic", elastic_json(bp.elastic)},
                       {"services", bp.services}});
    }
    doc["blueprints"] = bps;

    json insts = json::array();
    for (const auto& [id, inst] : instances_) {
        json reqs = json::array();
        for (const auto& r : inst.requirements)
            reqs.push_back(requirement_to_json(r));
        json units = json::array();
        for (const auto& u : inst.allocations)
            units.push_back({{"node", u.node},
                             {"type", u.type.to_string()},
                             {"quantity", jio::u64(u.quantity)},
                             {"region", u.region},
                             {"requirement", jio::u64(u.requirement)}});
        json prices = json::object();
        for (const auto& [type, price] : inst.fixed_unit_prices)
            prices[type.to_string()] = jio::amount(price);
        insts.push_back({{"id", id},
                         {"owner", inst.owner},
                         {"blueprint", inst.blueprint},
                         {"requirements", reqs},
                         {"allocations", units},
                         {"elastic", elastic_json(inst.elastic)},
                         {"services", inst.services},
                         {"booked_at", jio::u64(inst.booked_at)},
                         {"booked_until", jio::u64(inst.booked_until)},
                         {"fixed_unit_prices", prices},
                         {"paid_through", inst.paid_through ? jio::u64(*inst.paid_through)
                                                            : json(nullptr)}});
    }
    doc["instances"] = insts;

    json accruals = json::object();
    for (const auto& [epoch, per_node] : accruals_) {
        json row = json::object();
        for (const auto& [node, amount] : per_node)
            row[node] = jio::amount(amount);
        accruals[std::to_string(epoch)] = row;
    }
    doc["accruals"] = accruals;
    return doc;
}

ResourcePool ResourcePool::from_json(const json& doc)
{
    ResourcePool pool;
    pool.next_instance_ = jio::read_u64(doc.at("next_instance"));
    for (const auto& j : doc.at("blueprints")) {
        InstanceBlueprint bp;
        bp.id = j.at("id");
        for (const auto& r : j.at("requirements"))
            bp.requirements.push_back(requirement_from_json(r));
        bp.elastic = read_elastic(j.at("elastic"));
        bp.services = j.at("services").get<std::vector<std::string>>();
        pool.blueprints_.emplace(bp.id, std::move(bp));
    }
    for (const auto& j : doc.at("instances")) {
        Instance inst;
        inst.id = j.at("id");
        inst.owner = j.at("owner");
        inst.blueprint = j.at("blueprint");
        for (const auto& r : j.at("requirements"))
            inst.requirements.push_back(requirement_from_json(r));
        for (const auto& u : j.at("allocations"))
            inst.allocations.push_back({u.at("node"), ResourceType::parse(u.at("type").get<std::string>()),
                                        jio::read_u64(u.at("quantity")), u.at("region"),
                                        static_cast<std::size_t>(jio::read_u64(u.at("requirement")))});
        inst.elastic = read_elastic(j.at("elastic"));
        inst.services = j.at("services").get<std::vector<std::string>>();
        inst.booked_at = jio::read_u64(j.at("booked_at"));
        inst.booked_until = jio::read_u64(j.at("booked_until"));
        for (const auto& [key, price] : j.at("fixed_unit_prices").items())
            inst.fixed_unit_prices[ResourceType::parse(key)] = jio::read_amount(price);
        if (!j.at("paid_through").is_null())
            inst.paid_through = jio::read_u64(j.at("paid_through"));
        pool.instances_.emplace(inst.id, std::move(inst));
    }
    for (const auto& [epoch, row] : doc.at("accruals").items())
        for (const auto& [node, amount] : row.items())
            pool.accruals_[TokenAmount::parse(epoch).value()][node] = jio::read_amount(amount);
    return pool;
}

}  // namespace icn
