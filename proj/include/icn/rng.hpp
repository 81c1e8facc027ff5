#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace icn {

/// Seed for an independent sub-stream, derived by hashing
/// (run seed, purpose label, epoch, discriminator). Adding an actor never
/// perturbs draws made under other labels.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view label, std::uint64_t epoch,
                             std::string_view discriminator = {});

/// Portable draws on top of mt19937_64. The standard distributions are
/// implementation-defined, so bounded draws are done here by rejection.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}
    Stream(std::uint64_t seed, std::string_view label, std::uint64_t epoch,
           std::string_view discriminator = {})
        : engine_(substream_seed(seed, label, epoch, discriminator))
    {
    }

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    /// Uniform in [-amplitude, amplitude].
    std::int64_t symmetric(std::uint64_t amplitude);
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::mt19937_64 engine_;
};

}  // namespace icn
