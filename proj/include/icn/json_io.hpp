#pragma once

#include "icn/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

// Canonical JSON conventions: object keys sorted (nlohmann::json uses an
// ordered std::map), integers written as decimal strings, ratios as "p/q".
// Readers also accept plain JSON integers so hand-written scenarios stay
// readable.
namespace icn::json_io {

using nlohmann::json;

inline json u64(std::uint64_t v) { return std::to_string(v); }
inline json amount(TokenAmount v) { return v.to_string(); }
inline json ratio(const Ratio& v) { return v.to_string(); }

std::uint64_t read_u64(const json& value);
std::int64_t read_i64(const json& value);
TokenAmount read_amount(const json& value);
/// Accepts "p/q", decimal strings, integers and (shortest round-trip)
/// floating point literals.
Ratio read_ratio(const json& value);

json capacity(const CapacityVector& capacity);
CapacityVector read_capacity(const json& value);

json kpis(const KpiMap& values);
KpiMap read_kpis(const json& value);

}  // namespace icn::json_io
