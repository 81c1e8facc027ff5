#pragma once

#include "icn/protocol.hpp"

#include <string>

namespace icn::testing {

inline TokenAmount tok(std::uint64_t v) { return TokenAmount(v); }
inline ResourceType rt(const std::string& text) { return ResourceType::parse(text); }
inline Ratio r(const std::string& text) { return Ratio::parse(text); }

inline RegionEconomy region(const std::string& id, std::uint64_t storage_rate = 1)
{
    RegionEconomy e;
    e.id = id;
    e.per_unit_collateral_rates[rt("storage")] = tok(storage_rate);
    return e;
}

inline HardwareClass storage_class(const std::string& id = "S", std::uint64_t gib = 100)
{
    HardwareClass c;
    c.id = id;
    c.capacity_template[rt("storage")] = gib;
    c.performance_profile["iops"] = 1'000'000;
    c.challenge_set = {"io"};
    return c;
}

inline NodeRegistration reg(const std::string& id, const std::string& region,
                            std::uint64_t gib = 100, std::uint64_t price = 1,
                            const std::string& cls = "S", const std::string& provider = "prov")
{
    NodeRegistration n;
    n.id = id;
    n.provider = provider;
    n.hardware_class = cls;
    n.region = region;
    n.capacity[rt("storage")] = gib;
    n.rewards_share = Ratio(7, 10);
    n.reservation_price = tok(price);
    n.max_booking_duration = 1000;
    n.commitment_end = 100;
    return n;
}

inline Requirement need(const std::string& type, std::uint64_t qty,
                        std::set<RegionId> locality = {})
{
    Requirement q;
    q.type = rt(type);
    q.quantity = qty;
    q.locality = std::move(locality);
    return q;
}

/// Registry with regions "eu" and "us" and storage class "S" (100 GiB template).
inline HardwareRegistry basic_registry()
{
    HardwareRegistry reg_;
    reg_.add_region(region("eu"));
    reg_.add_region(region("us"));
    reg_.add_class(storage_class());
    return reg_;
}

/// Registers and activates a node straight in a registry (collateral passed in).
inline void add_active(HardwareRegistry& registry, const NodeRegistration& n, Epoch now = 0)
{
    registry.register_node(n, now);
    registry.activate(n.id, registry.min_collateral(n.id));
}

}  // namespace icn::testing
