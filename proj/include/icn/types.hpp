#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace icn {

using AccountId = std::string;
using NodeId = std::string;
using RegionId = std::string;
using ClassId = std::string;
using InstanceId = std::string;
using NftId = std::string;
using HyperNodeId = std::string;
using SubjectId = std::string;
using KpiName = std::string;

/// Protocol time step. Durations and lock horizons are all counted in epochs.
using Epoch = std::uint64_t;

enum class Errc {
    UnknownAccount,
    InsufficientBalance,
    InvalidAmount,
    InvalidDuration,
    StillLocked,
    UnknownLock,
    UnknownNode,
    SeverityOutOfRange,
    InvalidParameters,
    UnknownNft,
    AlreadyStaked,
    NodeOccupied,
    FullyDecayed,
    NodeInactive,
    DuplicateAnchor,
    UnauthorizedSubmitter,
    UnknownAnchor,
    UnknownClass,
    UnknownRegion,
    MalformedCapacity,
    InvalidCommitment,
    InsufficientCollateral,
    InvalidTransition,
    CommitmentActive,
    AllocationsOutstanding,
    DuplicateId,
    UnknownBlueprint,
    UnknownInstance,
    InsufficientCapacity,
    LocalityUnsatisfiable,
    KpiUnsatisfiable,
    NotElastic,
    BoundsExceeded,
    ProviderDeclined,
    CommitmentTooShort,
    NoEligibleHyperNodes,
    SubjectInactive,
    ReportsMissing,
    UnknownSubject,
    MalformedSpec,
    SettlementOutOfOrder,
    Overflow,
    ScenarioInvalid,
    InvariantViolation,
    ParseError,
};

std::string_view errc_name(Errc code) noexcept;

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(Errc code, const std::string& detail);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail = {});

/// Amount of ecosystem token in indivisible base units. All arithmetic is
/// overflow/underflow checked.
class TokenAmount {
public:
    constexpr TokenAmount() = default;
    constexpr explicit TokenAmount(std::uint64_t value) : value_(value) {}

    constexpr std::uint64_t value() const noexcept { return value_; }
    constexpr bool is_zero() const noexcept { return value_ == 0; }

    TokenAmount& operator+=(TokenAmount other);
    TokenAmount& operator-=(TokenAmount other);
    friend TokenAmount operator+(TokenAmount a, TokenAmount b) { return a += b; }
    friend TokenAmount operator-(TokenAmount a, TokenAmount b) { return a -= b; }
    TokenAmount times(std::uint64_t factor) const;

    constexpr auto operator<=>(const TokenAmount&) const = default;

    std::string to_string() const { return std::to_string(value_); }
    static TokenAmount parse(std::string_view text);

private:
    std::uint64_t value_ = 0;
};

/// Non-negative exact rational, always stored reduced.
class Ratio {
public:
    constexpr Ratio() = default;
    Ratio(std::uint64_t num, std::uint64_t den);
    static Ratio integer(std::uint64_t n) { return Ratio(n, 1); }
    static Ratio zero() { return Ratio(0, 1); }
    static Ratio one() { return Ratio(1, 1); }

    std::uint64_t num() const noexcept { return num_; }
    std::uint64_t den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_ == 0; }
    bool in_unit_interval() const noexcept { return num_ <= den_; }

    /// floor(this * x)
    std::uint64_t floor_mul(std::uint64_t x) const;
    /// ceil(this * x)
    std::uint64_t ceil_mul(std::uint64_t x) const;

    /// Products whose reduced form no longer fits 64 bits are rounded down
    /// onto a 2^30 denominator.
    Ratio operator*(const Ratio& other) const;
    Ratio operator+(const Ratio& other) const;

    std::strong_ordering operator<=>(const Ratio& other) const;
    bool operator==(const Ratio& other) const = default;

    /// "p/q" or "p" form, reduced.
    std::string to_string() const;
    /// Accepts "3", "3/4" and plain decimals such as "0.25".
    static Ratio parse(std::string_view text);

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

enum class ResourceKind { Storage, Compute, Memory, Networking };

std::string_view kind_name(ResourceKind kind) noexcept;
std::optional<ResourceKind> parse_kind(std::string_view text) noexcept;

/// A resource type is a kind plus an optional subclass tag such as "fast".
struct ResourceType {
    ResourceKind kind = ResourceKind::Storage;
    std::string subclass;

    auto operator<=>(const ResourceType&) const = default;

    /// "storage" or "storage:fast"
    std::string to_string() const;
    static ResourceType parse(std::string_view text);
};

/// Quantities in canonical units: storage GiB, compute vCPU, memory GiB,
/// networking Mbps.
using CapacityVector = std::map<ResourceType, std::uint64_t>;

std::uint64_t capacity_total(const CapacityVector& capacity);
bool capacity_is_zero(const CapacityVector& capacity);
std::string capacity_to_string(const CapacityVector& capacity);

/// Measured KPI values are integers in milli-units of the KPI's natural unit.
using KpiMap = std::map<KpiName, std::int64_t>;

}  // namespace icn
