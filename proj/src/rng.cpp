#include "icn/rng.hpp"

#include "icn/digest.hpp"

#include <limits>
#include <string>

namespace icn {

std::uint64_t substream_seed(std::uint64_t seed, std::string_view label, std::uint64_t epoch,
                             std::string_view discriminator)
{
    std::string material;
    material.reserve(label.size() + discriminator.size() + 48);
    material += std::to_string(seed);
    material += '\x1f';
    material += label;
    material += '\x1f';
    material += std::to_string(epoch);
    material += '\x1f';
    material += discriminator;
    Digest d = sha256(material);
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i)
        out = out << 8 | d[static_cast<std::size_t>(i)];
    return out;
}

std::uint64_t Stream::below(std::uint64_t bound)
{
    if (bound <= 1)
        return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
                                - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

std::int64_t Stream::symmetric(std::uint64_t amplitude)
{
    if (amplitude == 0)
        return 0;
    return static_cast<std::int64_t>(below(2 * amplitude + 1)) - static_cast<std::int64_t>(amplitude);
}

}  // namespace icn
