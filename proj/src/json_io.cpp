#include "icn/json_io.hpp"

#include <charconv>

namespace icn::json_io {

std::uint64_t read_u64(const json& value)
{
    if (value.is_number_unsigned())
        return value.get<std::uint64_t>();
    if (value.is_number_integer()) {
        auto v = value.get<std::int64_t>();
        if (v < 0)
            fail(Errc::ParseError, "negative value where unsigned expected");
        return static_cast<std::uint64_t>(v);
    }
    if (value.is_string())
        return TokenAmount::parse(value.get<std::string>()).value();
    fail(Errc::ParseError, "expected unsigned integer, got " + value.dump());
}

std::int64_t read_i64(const json& value)
{
    if (value.is_number_integer())
        return value.get<std::int64_t>();
    if (value.is_string()) {
        const auto& s = value.get_ref<const std::string&>();
        std::int64_t out = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            fail(Errc::ParseError, "not an integer: " + s);
        return out;
    }
    fail(Errc::ParseError, "expected integer, got " + value.dump());
}

TokenAmount read_amount(const json& value)
{
    return TokenAmount(read_u64(value));
}

Ratio read_ratio(const json& value)
{
    if (value.is_string())
        return Ratio::parse(value.get<std::string>());
    if (value.is_number_integer())
        return Ratio::integer(read_u64(value));
    if (value.is_number_float()) {
        double d = value.get<double>();
        if (d < 0)
            fail(Errc::ParseError, "negative ratio");
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::fixed);
        if (ec != std::errc{})
            fail(Errc::ParseError, "unrepresentable ratio");
        // shortest round-trip digits, so 0.7 reads as 7/10
        return Ratio::parse(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
    }
    fail(Errc::ParseError, "expected ratio, got " + value.dump());
}

json capacity(const CapacityVector& capacity)
{
    json out = json::object();
    for (const auto& [type, qty] : capacity)
        out[type.to_string()] = u64(qty);
    return out;
}

CapacityVector read_capacity(const json& value)
{
    if (!value.is_object())
        fail(Errc::ParseError, "capacity must be an object");
    CapacityVector out;
    for (const auto& [key, qty] : value.items())
        out[ResourceType::parse(key)] = read_u64(qty);
    return out;
}

json kpis(const KpiMap& values)
{
    json out = json::object();
    for (const auto& [name, v] : values)
        out[name] = std::to_string(v);
    return out;
}

KpiMap read_kpis(const json& value)
{
    if (!value.is_object())
        fail(Errc::ParseError, "kpi map must be an object");
    KpiMap out;
    for (const auto& [key, v] : value.items())
        out[key] = read_i64(v);
    return out;
}

}  // namespace icn::json_io
