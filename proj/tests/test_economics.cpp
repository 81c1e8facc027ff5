#include "fixtures.hpp"
#include "icn/economics.hpp"
#include "icn/rng.hpp"

#include <gtest/gtest.h>

using namespace icn;
using namespace icn::testing;

namespace {

Errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::ParseError;
}

struct Market {
    HardwareRegistry registry;
    Ledger ledger{{{"user", tok(100'000)}, {"prov", tok(0)}, {"alice", tok(1'000)},
                   {ResourcePool::kEscrowAccount, tok(0)}}};
    ResourcePool pool;
    Economics econ;
    std::map<NodeId, KpiMap> kpis;
    Epoch now = 0;

    Market(std::uint64_t target = 100, std::uint64_t emission = 160, Epoch bootstrap_end = 10)
    {
        auto eu = region("eu");
        eu.target_capacity[rt("storage")] = target;
        eu.bootstrap_emission_per_epoch = tok(emission);
        eu.bootstrap_end = bootstrap_end;
        registry.add_region(eu);
        registry.add_class(storage_class("S", 10));
    }
    SelectionContext ctx() const { return SelectionContext{registry, kpis, {}, now}; }
    SettlementResult settle(const std::set<NodeId>& failed = {})
    {
        auto r = econ.settle_epoch(now, failed, registry, pool, ledger);
        ledger.advance_epoch();
        ++now;
        return r;
    }
};

const RewardStatement* find(const SettlementResult& r, const NodeId& node, RewardSource src)
{
    for (const auto& st : r.statements)
        if (st.node == node && st.source == src)
            return &st;
    return nullptr;
}

}  // namespace

TEST(Split, SeventyThirty)
{
    auto st = split_reward(0, "n", RewardSource::AccessFee, tok(100), r("0.7"), {{"s", tok(5)}});
    EXPECT_EQ(st.provider_cut, tok(70));
    EXPECT_EQ(st.staker_cuts.at("s"), tok(30));
}

TEST(Split, NoStakersAllToProvider)
{
    auto st = split_reward(0, "n", RewardSource::Bootstrap, tok(101), r("0.5"), {});
    EXPECT_EQ(st.provider_cut, tok(101));
    EXPECT_TRUE(st.staker_cuts.empty());
}

TEST(Split, ExactAgainstFloorOracle)
{
    Stream rng(42);
    for (int iter = 0; iter < 2000; ++iter) {
        std::uint64_t gross = rng.below(1'000'000'000'000ULL);
        Ratio share(rng.below(1001), 1000);
        std::vector<StakerWeight> stakers;
        unsigned __int128 total = 0;
        for (std::uint64_t i = 0, n = rng.below(6); i < n; ++i) {
            std::uint64_t w = 1 + rng.below(1'000'000'000);
            stakers.push_back({"s" + std::to_string(i), tok(w)});
            total += w;
        }
        auto st = split_reward(0, "n", RewardSource::AccessFee, tok(gross), share, stakers);
        ASSERT_EQ(st.provider_cut + st.staker_total(), tok(gross));
        if (stakers.empty())
            continue;
        auto provider = static_cast<std::uint64_t>(static_cast<unsigned __int128>(gross) * share.num() / share.den());
        std::uint64_t remainder = gross - provider;
        std::uint64_t sum = 0;
        for (const auto& s : stakers) {
            auto expect = static_cast<std::uint64_t>(static_cast<unsigned __int128>(remainder) * s.weight.value() / total);
            auto it = st.staker_cuts.find(s.account);
            ASSERT_EQ(it == st.staker_cuts.end() ? 0 : it->second.value(), expect);
            sum += expect;
        }
        // dust never exceeds one unit per staker
        ASSERT_LE(remainder - sum, stakers.size());
    }
}

TEST(Bootstrap, OversubscribedTargetSplitsEvenly)
{
    Market m(100, 160);
    add_active(m.registry, reg("a", "eu", 80));
    add_active(m.registry, reg("b", "eu", 80));
    auto alloc = bootstrap_allocation(m.registry.region("eu"), m.registry);
    EXPECT_EQ(alloc.at("a"), tok(80));
    EXPECT_EQ(alloc.at("b"), tok(80));
}

TEST(Bootstrap, UndersubscribedLeavesEmissionUnpaid)
{
    Market m(400, 100);
    add_active(m.registry, reg("a", "eu", 100));
    add_active(m.registry, reg("b", "eu", 30));
    auto alloc = bootstrap_allocation(m.registry.region("eu"), m.registry);
    EXPECT_EQ(alloc.at("a"), tok(25));
    EXPECT_EQ(alloc.at("b"), tok(7));
}

TEST(Bootstrap, SplitsAcrossTargetTypes)
{
    Market m;
    auto us = region("us");
    us.target_capacity[rt("storage")] = 100;
    us.target_capacity[rt("compute")] = 10;
    us.bootstrap_emission_per_epoch = tok(101);
    us.bootstrap_end = 5;
    m.registry.add_region(us);
    add_active(m.registry, reg("s", "us", 100));
    auto alloc = bootstrap_allocation(m.registry.region("us"), m.registry);
    // 101 / 2 types = 50 each; no compute node exists
    EXPECT_EQ(alloc.at("s"), tok(50));
    EXPECT_EQ(alloc.size(), 1u);
}

TEST(Settle, BootstrapStopsAtEnd)
{
    Market m(100, 160, 2);
    add_active(m.registry, reg("a", "eu", 80));
    auto supply = m.ledger.accounted_total();
    auto r0 = m.settle();
    EXPECT_NE(find(r0, "a", RewardSource::Bootstrap), nullptr);
    EXPECT_EQ(r0.bootstrap_emitted, tok(128));
    m.settle();
    auto r2 = m.settle();
    EXPECT_TRUE(r2.statements.empty());
    EXPECT_EQ(m.ledger.emitted_total(), tok(256));
    EXPECT_EQ(m.ledger.accounted_total(), supply + tok(256));
    EXPECT_TRUE(m.ledger.conservation_holds());
}

TEST(Settle, AccessFeesPaidThroughEscrow)
{
    Market m(100, 0);
    add_active(m.registry, reg("a", "eu", 100, 3));
    m.ledger.stake("alice", "a", tok(10));
    m.pool.deploy("user", std::vector{need("storage", 10)}, 5, m.ctx(), m.registry, m.ledger);
    auto r0 = m.settle();
    const auto* st = find(r0, "a", RewardSource::AccessFee);
    ASSERT_NE(st, nullptr);
    EXPECT_EQ(st->gross, tok(30));
    EXPECT_EQ(st->provider_cut, tok(21));
    EXPECT_EQ(st->staker_cuts.at("alice"), tok(9));
    EXPECT_EQ(m.ledger.balance(ResourcePool::kEscrowAccount), tok(0));
    auto r1 = m.settle();
    EXPECT_EQ(r1.fees_charged, tok(30));
    EXPECT_EQ(m.ledger.balance("prov"), tok(42));
}

TEST(Settle, FailedNodeFeesBurnedAndBootstrapWithheld)
{
    Market m(100, 100);
    add_active(m.registry, reg("a", "eu", 50, 2));
    add_active(m.registry, reg("b", "eu", 50, 2));
    m.pool.deploy("user", std::vector{need("storage", 60)}, 5, m.ctx(), m.registry, m.ledger);
    auto r = m.settle({"a"});
    EXPECT_EQ(r.fees_charged, tok(120));
    EXPECT_EQ(r.fees_burned, tok(100));
    EXPECT_EQ(r.bootstrap_withheld, tok(50));
    EXPECT_EQ(r.bootstrap_emitted, tok(50));
    EXPECT_EQ(find(r, "a", RewardSource::AccessFee), nullptr);
    EXPECT_EQ(find(r, "a", RewardSource::Bootstrap), nullptr);
    EXPECT_EQ(m.ledger.burned_total(), tok(100));
    EXPECT_TRUE(m.ledger.conservation_holds());
}

TEST(Settle, ZeroStakeNodeKeepsEverything)
{
    Market m(100, 100);
    add_active(m.registry, reg("a", "eu", 100));
    auto r = m.settle();
    const auto* st = find(r, "a", RewardSource::Bootstrap);
    ASSERT_NE(st, nullptr);
    EXPECT_EQ(st->provider_cut, tok(100));
    EXPECT_EQ(m.ledger.balance("prov"), tok(100));
}

TEST(Settle, OutOfOrder)
{
    Market m;
    EXPECT_EQ(code_of([&] { m.econ.settle_epoch(1, {}, m.registry, m.pool, m.ledger); }),
              Errc::SettlementOutOfOrder);
    m.settle();
    EXPECT_EQ(code_of([&] { m.econ.settle_epoch(0, {}, m.registry, m.pool, m.ledger); }),
              Errc::SettlementOutOfOrder);
}

TEST(Settle, StakedNftSinkCountsAsStakerWeight)
{
    Market m(100, 0);
    add_active(m.registry, reg("a", "eu", 100, 10));
    auto pass = m.ledger.mint_nft("alice", tok(90), 100);
    m.ledger.stake_nft(pass.id, "a");
    m.ledger.stake("user", "a", tok(10));
    auto w = staker_weights("a", m.ledger);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[0].account, "alice");
    EXPECT_EQ(w[0].weight, tok(90));
    m.pool.deploy("user", std::vector{need("storage", 10)}, 5, m.ctx(), m.registry, m.ledger);
    auto r = m.settle();
    const auto* st = find(r, "a", RewardSource::AccessFee);
    ASSERT_NE(st, nullptr);
    EXPECT_EQ(st->staker_cuts.at("alice"), tok(27));
    EXPECT_EQ(st->staker_cuts.at("user"), tok(3));
}
