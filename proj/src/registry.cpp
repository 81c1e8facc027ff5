#include "icn/registry.hpp"

#include "icn/json_io.hpp"

namespace icn {

namespace jio = json_io;
using nlohmann::json;

std::string_view status_name(NodeStatus status) noexcept
{
    switch (status) {
    case NodeStatus::Registered: return "Registered";
    case NodeStatus::Active: return "Active";
    case NodeStatus::Suspended: return "Suspended";
    case NodeStatus::Retired: return "Retired";
    }
    return "?";
}

NodeStatus parse_status(std::string_view text)
{
    for (auto s : {NodeStatus::Registered, NodeStatus::Active, NodeStatus::Suspended,
                   NodeStatus::Retired})
        if (status_name(s) == text)
            return s;
    fail(Errc::ParseError, "unknown node status: " + std::string(text));
}

std::uint64_t ScalerNode::free(const ResourceType& type) const
{
    auto cap = capacity.find(type);
    if (cap == capacity.end())
        return 0;
    auto used = allocated.find(type);
    return cap->second - (used == allocated.end() ? 0 : used->second);
}

void HardwareRegistry::add_region(RegionEconomy region)
{
    if (regions_.contains(region.id))
        fail(Errc::DuplicateId, region.id);
    regions_.emplace(region.id, std::move(region));
}

void HardwareRegistry::add_class(HardwareClass hw_class)
{
    if (classes_.contains(hw_class.id))
        fail(Errc::DuplicateId, hw_class.id);
    if (capacity_is_zero(hw_class.capacity_template))
        fail(Errc::MalformedCapacity, "class template has no capacity");
    classes_.emplace(hw_class.id, std::move(hw_class));
}

const RegionEconomy& HardwareRegistry::region(const RegionId& id) const
{
    auto it = regions_.find(id);
    if (it == regions_.end())
        fail(Errc::UnknownRegion, id);
    return it->second;
}

const HardwareClass& HardwareRegistry::hardware_class(const ClassId& id) const
{
    auto it = classes_.find(id);
    if (it == classes_.end())
        fail(Errc::UnknownClass, id);
    return it->second;
}

const ScalerNode& HardwareRegistry::node(const NodeId& id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        fail(Errc::UnknownNode, id);
    return it->second;
}

ScalerNode& HardwareRegistry::node_ref(const NodeId& id)
{
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        fail(Errc::UnknownNode, id);
    return it->second;
}

const ScalerNode& HardwareRegistry::register_node(const NodeRegistration& reg, Epoch now)
{
    if (nodes_.contains(reg.id))
        fail(Errc::DuplicateId, reg.id);
    const auto& cls = hardware_class(reg.hardware_class);
    region(reg.region);

    for (const auto& [type, tmpl] : cls.capacity_template) {
        auto it = reg.capacity.find(type);
        if (it == reg.capacity.end())
            fail(Errc::MalformedCapacity, "missing " + type.to_string());
        bool conforms = tmpl == 0 ? it->second == 0 : it->second >= tmpl && it->second % tmpl == 0;
        if (!conforms)
            fail(Errc::MalformedCapacity,
                 type.to_string() + " must be a positive multiple of " + std::to_string(tmpl));
    }
    for (const auto& [type, qty] : reg.capacity)
        if (!cls.capacity_template.contains(type))
            fail(Errc::MalformedCapacity, "unexpected " + type.to_string());
    if (!reg.rewards_share.in_unit_interval())
        fail(Errc::InvalidParameters, "rewards_share must lie in [0,1]");
    if (reg.max_booking_duration == 0)
        fail(Errc::InvalidParameters, "max_booking_duration must be positive");
    if (reg.commitment_end <= now)
        fail(Errc::InvalidCommitment, "commitment must end in the future");

    ScalerNode n;
    n.id = reg.id;
    n.provider = reg.provider;
    n.hardware_class = reg.hardware_class;
    n.region = reg.region;
    n.capacity = reg.capacity;
    n.rewards_share = reg.rewards_share;
    n.reservation_price = reg.reservation_price;
    n.max_booking_duration = reg.max_booking_duration;
    n.commitment_end = reg.commitment_end;
    n.registered_at = now;
    n.true_profile = reg.true_profile.value_or(cls.performance_profile);
    return nodes_.emplace(n.id, std::move(n)).first->second;
}

TokenAmount HardwareRegistry::min_collateral(const NodeId& id) const
{
    const auto& n = node(id);
    const auto& rates = region(n.region).per_unit_collateral_rates;
    TokenAmount total;
    for (const auto& [type, qty] : n.capacity) {
        auto it = rates.find(type);
        if (it == rates.end())
            it = rates.find(ResourceType{type.kind, {}});
        if (it != rates.end())
            total += it->second.times(qty);
    }
    return total;
}

NodeStatus HardwareRegistry::activate(const NodeId& id, TokenAmount collateral)
{
    auto& n = node_ref(id);
    switch (n.status) {
    case NodeStatus::Active:
        return n.status;
    case NodeStatus::Retired:
        fail(Errc::InvalidTransition, id + " is retired");
    case NodeStatus::Registered:
    case NodeStatus::Suspended:
        break;
    }
    TokenAmount needed = min_collateral(id);
    if (collateral < needed)
        fail(Errc::InsufficientCollateral,
             id + " has " + collateral.to_string() + ", needs " + needed.to_string());
    n.status = NodeStatus::Active;
    return n.status;
}

void HardwareRegistry::suspend(const NodeId& id)
{
    auto& n = node_ref(id);
    if (n.status != NodeStatus::Active)
        fail(Errc::InvalidTransition, id + " is not active");
    n.status = NodeStatus::Suspended;
}

void HardwareRegistry::retire(const NodeId& id, Epoch now)
{
    auto& n = node_ref(id);
    if (n.status != NodeStatus::Active && n.status != NodeStatus::Suspended)
        fail(Errc::InvalidTransition,
             id + " cannot retire from " + std::string(status_name(n.status)));
    if (now < n.commitment_end)
        fail(Errc::CommitmentActive, id + " committed until " + std::to_string(n.commitment_end));
    if (!capacity_is_zero(n.allocated))
        fail(Errc::AllocationsOutstanding, id);
    n.status = NodeStatus::Retired;
}

void HardwareRegistry::set_reservation_price(const NodeId& id, TokenAmount price)
{
    node_ref(id).reservation_price = price;
}

void HardwareRegistry::allocate(const NodeId& id, const ResourceType& type, std::uint64_t qty)
{
    auto& n = node_ref(id);
    if (qty > n.free(type))
        fail(Errc::InsufficientCapacity, id + " " + type.to_string());
    n.allocated[type] += qty;
}

void HardwareRegistry::release(const NodeId& id, const ResourceType& type, std::uint64_t qty)
{
    auto& n = node_ref(id);
    auto it = n.allocated.find(type);
    if (it == n.allocated.end() || it->second < qty)
        fail(Errc::InvalidAmount, "releasing more than allocated on " + id);
    it->second -= qty;
    if (it->second == 0)
        n.allocated.erase(it);
}

CapacityVector HardwareRegistry::capability_map(const RegionId& region_id) const
{
    region(region_id);
    CapacityVector out;
    for (const auto& [id, n] : nodes_) {
        if (n.region != region_id || n.status != NodeStatus::Active)
            continue;
        for (const auto& [type, qty] : n.capacity)
            out[type] += n.free(type);
    }
    return out;
}

json HardwareRegistry::to_json() const
{
    json doc;
    json regions = json::array();
    for (const auto& [id, r] : regions_) {
        json rates = json::object();
        for (const auto& [type, rate] : r.per_unit_collateral_rates)
            rates[type.to_string()] = jio::amount(rate);
        regions.push_back({{"id", id},
                           {"target_capacity", jio::capacity(r.target_capacity)},
                           {"bootstrap_end", jio::u64(r.bootstrap_end)},
                           {"bootstrap_emission_per_epoch",
                            jio::amount(r.bootstrap_emission_per_epoch)},
                           {"collateral_rates", rates}});
    }
    doc["regions"] = regions;

    json classes = json::array();
    for (const auto& [id, c] : classes_)
        classes.push_back({{"id", id},
                           {"capacity", jio::capacity(c.capacity_template)},
                           {"performance_profile", jio::kpis(c.performance_profile)},
                           {"challenge_set", c.challenge_set}});
    doc["hardware_classes"] = classes;

    json nodes = json::array();
    for (const auto& [id, n] : nodes_)
        nodes.push_back({{"id", id},
                         {"provider", n.provider},
                         {"class", n.hardware_class},
                         {"region", n.region},
                         {"capacity", jio::capacity(n.capacity)},
                         {"allocated", jio::capacity(n.allocated)},
                         {"rewards_share", jio::ratio(n.rewards_share)},
                         {"reservation_price", jio::amount(n.reservation_price)},
                         {"max_booking_duration", jio::u64(n.max_booking_duration)},
                         {"commitment_end", jio::u64(n.commitment_end)},
                         {"registered_at", jio::u64(n.registered_at)},
                         {"status", status_name(n.status)},
                         {"true_profile", jio::kpis(n.true_profile)}});
    doc["nodes"] = nodes;
    return doc;
}

HardwareRegistry HardwareRegistry::from_json(const json& doc)
{
    HardwareRegistry reg;
    for (const auto& j : doc.at("regions")) {
        RegionEconomy r;
        r.id = j.at("id");
        r.target_capacity = jio::read_capacity(j.at("target_capacity"));
        r.bootstrap_end = jio::read_u64(j.at("bootstrap_end"));
        r.bootstrap_emission_per_epoch = jio::read_amount(j.at("bootstrap_emission_per_epoch"));
        for (const auto& [key, rate] : j.at("collateral_rates").items())
            r.per_unit_collateral_rates[ResourceType::parse(key)] = jio::read_amount(rate);
        reg.regions_.emplace(r.id, std::move(r));
    }
    for (const auto& j : doc.at("hardware_classes")) {
        HardwareClass c;
        c.id = j.at("id");
        c.capacity_template = jio::read_capacity(j.at("capacity"));
        c.performance_profile = jio::read_kpis(j.at("performance_profile"));
        c.challenge_set = j.at("challenge_set").get<std::vector<std::string>>();
        reg.classes_.emplace(c.id, std::move(c));
    }
    for (const auto& j : doc.at("nodes")) {
        ScalerNode n;
        n.id = j.at("id");
        n.provider = j.at("provider");
        n.hardware_class = j.at("class");
        n.region = j.at("region");
        n.capacity = jio::read_capacity(j.at("capacity"));
        n.allocated = jio::read_capacity(j.at("allocated"));
        n.rewards_share = jio::read_ratio(j.at("rewards_share"));
        n.reservation_price = jio::read_amount(j.at("reservation_price"));
        n.max_booking_duration = jio::read_u64(j.at("max_booking_duration"));
        n.commitment_end = jio::read_u64(j.at("commitment_end"));
        n.registered_at = jio::read_u64(j.at("registered_at"));
        n.status = parse_status(j.at("status").get<std::string>());
        n.true_profile = jio::read_kpis(j.at("true_profile"));
        reg.nodes_.emplace(n.id, std::move(n));
    }
    return reg;
}

}  // namespace icn
