#include "checks.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace icn::checks;

namespace {

std::string scratch(const char* name)
{
    auto dir = std::filesystem::temp_directory_path() / "icn-properties" / name;
    std::filesystem::remove_all(dir);
    return dir.string();
}

}  // namespace

TEST(Properties, ShortConservationRun)
{
    ConservationParams p;
    p.seed = 11;
    p.epochs = 60;
    p.nodes = 10;
    p.deploys = 20;
    p.faults = 5;
    p.min_nodes = p.min_deploys = p.min_faults = 0;
    auto out = conservation(p);
    EXPECT_TRUE(out.ok) << out.detail;
}

TEST(Properties, AllocationWalk)
{
    for (std::uint64_t seed : {1, 2, 3}) {
        auto out = allocation_random_walk(seed, 1500);
        EXPECT_TRUE(out.ok) << out.detail;
    }
}

TEST(Properties, AllocationOracle)
{
    auto out = allocation_oracle(17, 200, 6);
    EXPECT_TRUE(out.ok) << out.detail;
}

TEST(Properties, ProofBinding)
{
    auto out = proof_binding(9, 5);
    EXPECT_TRUE(out.ok) << out.detail;
}

TEST(Properties, SlashProportionality)
{
    auto out = slash_proportionality(13, 300);
    EXPECT_TRUE(out.ok) << out.detail;
}

TEST(Properties, NftLifecycle)
{
    auto out = nft_lifecycle(21, 200);
    EXPECT_TRUE(out.ok) << out.detail;
}

TEST(Properties, RegimeSwitch)
{
    auto out = regime_switch(1, scratch("regime"));
    EXPECT_TRUE(out.ok) << out.detail;
}

TEST(Properties, PriceFixing)
{
    auto out = price_fixing(1);
    EXPECT_TRUE(out.ok) << out.detail;
}
