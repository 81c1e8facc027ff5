#include "icn/types.hpp"

#include <charconv>
#include <limits>
#include <numeric>

namespace icn {

namespace {

using u128 = unsigned __int128;
constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

std::uint64_t parse_u64(std::string_view text)
{
    std::uint64_t out = 0;
    if (text.empty())
        fail(Errc::ParseError, "empty integer");
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(Errc::ParseError, "not an unsigned integer: " + std::string(text));
    return out;
}

u128 gcd128(u128 a, u128 b)
{
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Ratio from_wide(u128 num, u128 den)
{
    u128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num <= kMax && den <= kMax)
        return Ratio(static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den));
    constexpr std::uint64_t coarse = 1ULL << 30;
    u128 scaled = num * coarse / den;
    if (scaled > kMax)
        fail(Errc::Overflow, "ratio out of range");
    return Ratio(static_cast<std::uint64_t>(scaled), coarse);
}

}  // namespace

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::UnknownAccount: return "UnknownAccount";
    case Errc::InsufficientBalance: return "InsufficientBalance";
    case Errc::InvalidAmount: return "InvalidAmount";
    case Errc::InvalidDuration: return "InvalidDuration";
    case Errc::StillLocked: return "StillLocked";
    case Errc::UnknownLock: return "UnknownLock";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::SeverityOutOfRange: return "SeverityOutOfRange";
    case Errc::InvalidParameters: return "InvalidParameters";
    case Errc::UnknownNft: return "UnknownNft";
    case Errc::AlreadyStaked: return "AlreadyStaked";
    case Errc::NodeOccupied: return "NodeOccupied";
    case Errc::FullyDecayed: return "FullyDecayed";
    case Errc::NodeInactive: return "NodeInactive";
    case Errc::DuplicateAnchor: return "DuplicateAnchor";
    case Errc::UnauthorizedSubmitter: return "UnauthorizedSubmitter";
    case Errc::UnknownAnchor: return "UnknownAnchor";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::UnknownRegion: return "UnknownRegion";
    case Errc::MalformedCapacity: return "MalformedCapacity";
    case Errc::InvalidCommitment: return "InvalidCommitment";
    case Errc::InsufficientCollateral: return "InsufficientCollateral";
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::CommitmentActive: return "CommitmentActive";
    case Errc::AllocationsOutstanding: return "AllocationsOutstanding";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnknownBlueprint: return "UnknownBlueprint";
    case Errc::UnknownInstance: return "UnknownInstance";
    case Errc::InsufficientCapacity: return "InsufficientCapacity";
    case Errc::LocalityUnsatisfiable: return "LocalityUnsatisfiable";
    case Errc::KpiUnsatisfiable: return "KpiUnsatisfiable";
    case Errc::NotElastic: return "NotElastic";
    case Errc::BoundsExceeded: return "BoundsExceeded";
    case Errc::ProviderDeclined: return "ProviderDeclined";
    case Errc::CommitmentTooShort: return "CommitmentTooShort";
    case Errc::NoEligibleHyperNodes: return "NoEligibleHyperNodes";
    case Errc::SubjectInactive: return "SubjectInactive";
    case Errc::ReportsMissing: return "ReportsMissing";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::MalformedSpec: return "MalformedSpec";
    case Errc::SettlementOutOfOrder: return "SettlementOutOfOrder";
    case Errc::Overflow: return "Overflow";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

ProtocolError::ProtocolError(Errc code, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(errc_name(code))
                                        : std::string(errc_name(code)) + ": " + detail)
    , code_(code)
{
}

void fail(Errc code, const std::string& detail)
{
    throw ProtocolError(code, detail);
}

TokenAmount& TokenAmount::operator+=(TokenAmount other)
{
    if (value_ > kMax - other.value_)
        fail(Errc::Overflow, "token addition");
    value_ += other.value_;
    return *this;
}

TokenAmount& TokenAmount::operator-=(TokenAmount other)
{
    if (other.value_ > value_)
        fail(Errc::Overflow, "token subtraction below zero");
    value_ -= other.value_;
    return *this;
}

TokenAmount TokenAmount::times(std::uint64_t factor) const
{
    u128 p = static_cast<u128>(value_) * factor;
    if (p > kMax)
        fail(Errc::Overflow, "token multiplication");
    return TokenAmount(static_cast<std::uint64_t>(p));
}

TokenAmount TokenAmount::parse(std::string_view text)
{
    return TokenAmount(parse_u64(text));
}

Ratio::Ratio(std::uint64_t num, std::uint64_t den)
{
    if (den == 0)
        fail(Errc::InvalidParameters, "zero denominator");
    std::uint64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::uint64_t Ratio::floor_mul(std::uint64_t x) const
{
    u128 p = static_cast<u128>(x) * num_ / den_;
    if (p > kMax)
        fail(Errc::Overflow, "ratio product");
    return static_cast<std::uint64_t>(p);
}

std::uint64_t Ratio::ceil_mul(std::uint64_t x) const
{
    u128 p = (static_cast<u128>(x) * num_ + den_ - 1) / den_;
    if (p > kMax)
        fail(Errc::Overflow, "ratio product");
    return static_cast<std::uint64_t>(p);
}

Ratio Ratio::operator*(const Ratio& other) const
{
    return from_wide(static_cast<u128>(num_) * other.num_, static_cast<u128>(den_) * other.den_);
}

Ratio Ratio::operator+(const Ratio& other) const
{
    u128 n = static_cast<u128>(num_) * other.den_ + static_cast<u128>(other.num_) * den_;
    return from_wide(n, static_cast<u128>(den_) * other.den_);
}

std::strong_ordering Ratio::operator<=>(const Ratio& other) const
{
    u128 lhs = static_cast<u128>(num_) * other.den_;
    u128 rhs = static_cast<u128>(other.num_) * den_;
    return lhs <=> rhs;
}

std::string Ratio::to_string() const
{
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Ratio Ratio::parse(std::string_view text)
{
    if (auto slash = text.find('/'); slash != std::string_view::npos)
        return Ratio(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 18)
            fail(Errc::ParseError, "bad decimal: " + std::string(text));
        std::uint64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        std::uint64_t w = whole.empty() ? 0 : parse_u64(whole);
        u128 n = static_cast<u128>(w) * den + parse_u64(frac);
        return from_wide(n, den);
    }
    return Ratio(parse_u64(text), 1);
}

std::string_view kind_name(ResourceKind kind) noexcept
{
    switch (kind) {
    case ResourceKind::Storage: return "storage";
    case ResourceKind::Compute: return "compute";
    case ResourceKind::Memory: return "memory";
    case ResourceKind::Networking: return "networking";
    }
    return "?";
}

std::optional<ResourceKind> parse_kind(std::string_view text) noexcept
{
    if (text == "storage")
        return ResourceKind::Storage;
    if (text == "compute")
        return ResourceKind::Compute;
    if (text == "memory")
        return ResourceKind::Memory;
    if (text == "networking")
        return ResourceKind::Networking;
    return std::nullopt;
}

std::string ResourceType::to_string() const
{
    std::string out(kind_name(kind));
    if (!subclass.empty())
        out += ":" + subclass;
    return out;
}

ResourceType ResourceType::parse(std::string_view text)
{
    auto colon = text.find(':');
    auto kind = parse_kind(text.substr(0, colon));
    if (!kind)
        fail(Errc::ParseError, "unknown resource kind: " + std::string(text));
    ResourceType out{*kind, {}};
    if (colon != std::string_view::npos) {
        out.subclass = std::string(text.substr(colon + 1));
        if (out.subclass.empty())
            fail(Errc::ParseError, "empty subclass: " + std::string(text));
    }
    return out;
}

std::uint64_t capacity_total(const CapacityVector& capacity)
{
    std::uint64_t total = 0;
    for (const auto& [type, qty] : capacity)
        total += qty;
    return total;
}

bool capacity_is_zero(const CapacityVector& capacity)
{
    for (const auto& [type, qty] : capacity)
        if (qty != 0)
            return false;
    return true;
}

std::string capacity_to_string(const CapacityVector& capacity)
{
    std::string out;
    for (const auto& [type, qty] : capacity) {
        if (!out.empty())
            out += ';';
        out += type.to_string() + "=" + std::to_string(qty);
    }
    return out;
}

}  // namespace icn
