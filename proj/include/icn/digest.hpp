#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace icn {

/// SHA-256 output. The hash function is fixed for the whole build.
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view bytes);

std::string to_hex(const Digest& digest);
/// Throws ProtocolError(ParseError) unless `hex` is exactly 64 hex chars.
Digest digest_from_hex(std::string_view hex);

}  // namespace icn
