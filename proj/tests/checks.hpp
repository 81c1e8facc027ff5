#pragma once

#include <cstdint>
#include <string>

namespace icn::checks {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct ConservationParams {
    std::uint64_t seed = 1;
    std::uint64_t epochs = 200;
    std::size_t nodes = 24;
    std::size_t deploys = 70;
    std::size_t faults = 20;
    /// Floors the run must reach to count.
    std::size_t min_nodes = 20;
    std::size_t min_deploys = 50;
    std::size_t min_faults = 10;
};

Outcome conservation(const ConservationParams& p);
Outcome allocation_random_walk(std::uint64_t seed, std::size_t operations);
Outcome allocation_oracle(std::uint64_t seed, std::size_t trials, std::size_t max_nodes);
Outcome proof_binding(std::uint64_t seed, std::size_t reports);
Outcome slash_proportionality(std::uint64_t seed, std::size_t trials);
Outcome nft_lifecycle(std::uint64_t seed, std::size_t trials);
Outcome regime_switch(std::uint64_t seed, const std::string& scratch_dir);
Outcome price_fixing(std::uint64_t seed);
Outcome determinism(const std::string& scenario_path, const std::string& scratch_dir);

}  // namespace icn::checks
