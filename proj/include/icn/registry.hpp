#pragma once

#include "icn/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <vector>

namespace icn {

enum class NodeStatus { Registered, Active, Suspended, Retired };

std::string_view status_name(NodeStatus status) noexcept;
NodeStatus parse_status(std::string_view text);

/// Per-region economic parameters. Target capacity and emission drive
/// bootstrap rewards; collateral rates drive the activation minimum.
struct RegionEconomy {
    RegionId id;
    CapacityVector target_capacity;
    Epoch bootstrap_end = 0;
    TokenAmount bootstrap_emission_per_epoch;
    std::map<ResourceType, TokenAmount> per_unit_collateral_rates;
};

struct HardwareClass {
    ClassId id;
    CapacityVector capacity_template;
    KpiMap performance_profile;
    std::vector<std::string> challenge_set;
};

struct NodeRegistration {
    NodeId id;
    AccountId provider;
    ClassId hardware_class;
    RegionId region;
    CapacityVector capacity;
    Ratio rewards_share;
    TokenAmount reservation_price;
    Epoch max_booking_duration = 0;
    Epoch commitment_end = 0;
    /// Actual KPI behaviour; defaults to the class profile.
    std::optional<KpiMap> true_profile;
};

struct ScalerNode {
    NodeId id;
    AccountId provider;
    ClassId hardware_class;
    RegionId region;
    CapacityVector capacity;
    Ratio rewards_share;
    TokenAmount reservation_price;
    Epoch max_booking_duration = 0;
    Epoch commitment_end = 0;
    Epoch registered_at = 0;
    NodeStatus status = NodeStatus::Registered;
    KpiMap true_profile;
    CapacityVector allocated;

    std::uint64_t free(const ResourceType& type) const;
};

/// Catalog of regions, hardware classes and ScalerNodes. Tracks per-node
/// allocated quantities so capacity queries stay pure.
class HardwareRegistry {
public:
    void add_region(RegionEconomy region);
    void add_class(HardwareClass hw_class);

    const RegionEconomy& region(const RegionId& id) const;
    const HardwareClass& hardware_class(const ClassId& id) const;
    bool has_region(const RegionId& id) const { return regions_.contains(id); }
    bool has_class(const ClassId& id) const { return classes_.contains(id); }
    const std::map<RegionId, RegionEconomy>& regions() const noexcept { return regions_; }
    const std::map<ClassId, HardwareClass>& classes() const noexcept { return classes_; }

    const ScalerNode& register_node(const NodeRegistration& reg, Epoch now);

    TokenAmount min_collateral(const NodeId& node) const;
    /// Registered or Suspended -> Active when collateral suffices; Active is a
    /// no-op.
    NodeStatus activate(const NodeId& node, TokenAmount collateral);
    void suspend(const NodeId& node);
    void retire(const NodeId& node, Epoch now);

    void set_reservation_price(const NodeId& node, TokenAmount price);

    void allocate(const NodeId& node, const ResourceType& type, std::uint64_t qty);
    void release(const NodeId& node, const ResourceType& type, std::uint64_t qty);

    /// Free capacity of Active nodes in the region.
    CapacityVector capability_map(const RegionId& region) const;

    bool has_node(const NodeId& id) const { return nodes_.contains(id); }
    const ScalerNode& node(const NodeId& id) const;
    const std::map<NodeId, ScalerNode>& nodes() const noexcept { return nodes_; }

    nlohmann::json to_json() const;
    static HardwareRegistry from_json(const nlohmann::json& doc);

private:
    ScalerNode& node_ref(const NodeId& id);

    std::map<RegionId, RegionEconomy> regions_;
    std::map<ClassId, HardwareClass> classes_;
    std::map<NodeId, ScalerNode> nodes_;
};

}  // namespace icn
