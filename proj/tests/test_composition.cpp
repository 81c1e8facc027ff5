#include "fixtures.hpp"
#include "icn/composition.hpp"

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

struct Env {
    HardwareRegistry registry = basic_registry();
    Ledger ledger{{{"user", tok(1'000'000)}, {ResourcePool::kEscrowAccount, tok(0)}}};
    std::map<NodeId, KpiMap> kpis;
    SelectionWeights weights;
    ResourcePool pool;
    Epoch now = 0;

    SelectionContext ctx() const { return SelectionContext{registry, kpis, weights, now}; }
    const Instance& deploy(const DeploySpec& spec, Epoch duration = 10)
    {
        return pool.deploy("user", spec, duration, ctx(), registry, ledger);
    }
};

std::set<NodeId> nodes_of(const Instance& inst)
{
    std::set<NodeId> out;
    for (const auto& u : inst.allocations)
        out.insert(u.node);
    return out;
}

}  // namespace

TEST(Deploy, LocalityKeepsUnitsInRegion)
{
    Env env;
    add_active(env.registry, reg("eu-1", "eu", 100));
    add_active(env.registry, reg("eu-2", "eu", 100));
    add_active(env.registry, reg("us-1", "us", 500));
    const auto& inst = env.deploy(std::vector{need("storage", 100, {"eu"})});
    EXPECT_EQ(inst.allocated(rt("storage")), 100u);
    for (const auto& u : inst.allocations) {
        EXPECT_EQ(u.region, "eu");
        EXPECT_EQ(env.registry.node(u.node).region, "eu");
    }
}

TEST(Deploy, InsufficientCapacity)
{
    Env env;
    add_active(env.registry, reg("eu-1", "eu", 100));
    add_active(env.registry, reg("us-1", "us", 500));
    EXPECT_EQ(code_of([&] { env.deploy(std::vector{need("storage", 101, {"eu"})}); }),
              Errc::InsufficientCapacity);
    EXPECT_EQ(code_of([&] { env.deploy(std::vector{need("compute", 1)}); }), Errc::InsufficientCapacity);
    EXPECT_EQ(env.registry.capability_map("eu").at(rt("storage")), 100u);
}

TEST(Deploy, LocalityAndKpiErrors)
{
    Env env;
    add_active(env.registry, reg("us-1", "us", 500));
    EXPECT_EQ(code_of([&] { env.deploy(std::vector{need("storage", 10, {"eu"})}); }),
              Errc::LocalityUnsatisfiable);
    auto q = need("storage", 10);
    q.min_kpi["iops"] = 800'000;
    EXPECT_EQ(code_of([&] { env.deploy(std::vector{q}); }), Errc::KpiUnsatisfiable);
    env.kpis["us-1"]["iops"] = 800'000;
    EXPECT_NO_THROW(env.deploy(std::vector{q}));
}

TEST(Deploy, TieBreaksOnSmallerId)
{
    Env env;
    add_active(env.registry, reg("n-b", "eu", 100));
    add_active(env.registry, reg("n-a", "eu", 100));
    const auto& inst = env.deploy(std::vector{need("storage", 50)});
    EXPECT_EQ(nodes_of(inst), std::set<NodeId>{"n-a"});
}

TEST(Deploy, PerformanceWeightPicksBetterNode)
{
    Env env;
    env.weights = {Ratio::one(), Ratio::zero(), Ratio::zero()};
    add_active(env.registry, reg("a", "eu", 100));
    add_active(env.registry, reg("b", "eu", 100));
    env.kpis["a"]["iops"] = 500'000;
    env.kpis["b"]["iops"] = 900'000;
    const auto& nominal = env.registry.hardware_class("S").performance_profile.at("iops");
    EXPECT_EQ(perf_score_ppm(env.registry.hardware_class("S"), &env.kpis["b"]),
              900'000ULL * 1'000'000 / static_cast<std::uint64_t>(nominal));
    auto ranked = rank_candidates(need("storage", 50), 10, env.ctx());
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked[0].node, "b");
    const auto& inst = env.deploy(std::vector{need("storage", 50)});
    EXPECT_EQ(nodes_of(inst), std::set<NodeId>{"b"});
}

TEST(Deploy, SplitsAcrossNodesWhenNeeded)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100));
    add_active(env.registry, reg("b", "eu", 100));
    const auto& inst = env.deploy(std::vector{need("storage", 150)});
    EXPECT_EQ(inst.allocated(rt("storage")), 150u);
    EXPECT_EQ(nodes_of(inst).size(), 2u);
    EXPECT_EQ(env.registry.capability_map("eu").at(rt("storage")), 50u);
}

TEST(Deploy, RespectsMaxBookingDuration)
{
    Env env;
    auto short_node = reg("a", "eu", 100);
    short_node.max_booking_duration = 5;
    add_active(env.registry, short_node);
    EXPECT_EQ(code_of([&] { env.deploy(std::vector{need("storage", 10)}, 6); }), Errc::InsufficientCapacity);
    EXPECT_NO_THROW(env.deploy(std::vector{need("storage", 10)}, 5));
}

TEST(Deploy, ChargesFirstEpochImmediately)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 3));
    auto before = env.ledger.balance("user");
    const auto& inst = env.deploy(std::vector{need("storage", 40)});
    EXPECT_EQ(inst.per_epoch_fee(), tok(40 * 3));
    EXPECT_EQ(env.ledger.balance("user"), before - tok(120));
    EXPECT_EQ(env.pool.accruals().at(0).at("a"), tok(120));
}

TEST(Deploy, RejectsOwnerWhoCannotPay)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 3));
    env.ledger.open_account("poor");
    EXPECT_EQ(code_of([&] {
                  env.pool.deploy("poor", std::vector{need("storage", 1)}, 5, env.ctx(), env.registry, env.ledger);
              }),
              Errc::InsufficientBalance);
    EXPECT_TRUE(env.pool.instances().empty());
    EXPECT_EQ(env.registry.node("a").free(rt("storage")), 100u);
}

TEST(Quote, MatchesDeployOnUnchangedState)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 2));
    add_active(env.registry, reg("b", "us", 100, 5));
    env.pool.add_blueprint({"bp", {need("storage", 150)}, std::nullopt, {}});
    auto quote = env.pool.quote(DeploySpec{"bp"}, std::nullopt, 10, env.ctx());
    const auto& inst = env.deploy(DeploySpec{"bp"});
    EXPECT_EQ(quote.per_epoch_fee, inst.per_epoch_fee());
    EXPECT_EQ(quote.allocations.size(), inst.allocations.size());
    // Max price among suppliers of the type, times units.
    EXPECT_EQ(inst.per_epoch_fee(), tok(150 * 5));
}

TEST(Quote, EmptyRegionIsInsufficientCapacity)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100));
    EXPECT_EQ(code_of([&] { env.pool.quote(std::vector{need("storage", 1)}, RegionId("us"), 1, env.ctx()); }),
              Errc::InsufficientCapacity);
}

TEST(Scale, BoundsFromBaseRequirement)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 300));
    env.pool.add_blueprint({"el", {need("storage", 100)}, ElasticBounds{Ratio(1, 2), Ratio(2, 1)}, {}});
    env.deploy(DeploySpec{"el"});
    auto id = env.pool.instances().begin()->first;
    EXPECT_EQ(env.pool.scale(id, rt("storage"), 100, env.ctx(), env.registry).allocated(rt("storage")), 200u);
    EXPECT_EQ(code_of([&] { env.pool.scale(id, rt("storage"), 1, env.ctx(), env.registry); }),
              Errc::BoundsExceeded);
    EXPECT_EQ(env.pool.scale(id, rt("storage"), -100, env.ctx(), env.registry).allocated(rt("storage")), 100u);
    // 100 - 60 = 40 < floor bound 0.5 * 100 = 50
    EXPECT_EQ(code_of([&] { env.pool.scale(id, rt("storage"), -60, env.ctx(), env.registry); }),
              Errc::BoundsExceeded);
    EXPECT_EQ(env.pool.scale(id, rt("storage"), -50, env.ctx(), env.registry).allocated(rt("storage")), 50u);
    EXPECT_EQ(env.registry.node("a").free(rt("storage")), 250u);
}

TEST(Scale, NotElasticAndCapacity)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100));
    const auto& fixed = env.deploy(std::vector{need("storage", 10)});
    auto id = fixed.id;
    EXPECT_EQ(code_of([&] { env.pool.scale(id, rt("storage"), 1, env.ctx(), env.registry); }), Errc::NotElastic);

    env.pool.add_blueprint({"el", {need("storage", 60)}, ElasticBounds{Ratio(1, 2), Ratio(3, 1)}, {}});
    const auto& el = env.deploy(DeploySpec{"el"});
    auto el_id = el.id;
    EXPECT_EQ(code_of([&] { env.pool.scale(el_id, rt("storage"), 40, env.ctx(), env.registry); }),
              Errc::InsufficientCapacity);
}

TEST(Scale, NewUnitsUseFrozenPrices)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 2));
    add_active(env.registry, reg("b", "eu", 100, 2));
    env.pool.add_blueprint({"el", {need("storage", 80)}, ElasticBounds{Ratio::one(), Ratio(2, 1)}, {}});
    auto id = env.deploy(DeploySpec{"el"}).id;
    env.registry.set_reservation_price("a", tok(9));
    env.registry.set_reservation_price("b", tok(9));
    const auto& inst = env.pool.scale(id, rt("storage"), 80, env.ctx(), env.registry);
    EXPECT_EQ(inst.per_epoch_fee(), tok(160 * 2));
}

TEST(Release, RestoresCapabilityMapAndChargesCurrentEpochOnly)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 1));
    add_active(env.registry, reg("b", "eu", 200, 1));
    auto before = env.registry.capability_map("eu");
    auto id = env.deploy(std::vector{need("storage", 250)}).id;
    env.now = 1;
    auto paid = env.ledger.balance("user");
    env.pool.release(id, 1, env.registry, env.ledger);
    EXPECT_EQ(env.registry.capability_map("eu"), before);
    EXPECT_EQ(env.ledger.balance("user"), paid - tok(250));
    EXPECT_EQ(env.pool.accruals().count(1), 1u);
    auto billed = env.pool.bill(2, env.registry, env.ledger);
    EXPECT_TRUE(billed.charged.empty());
    EXPECT_EQ(env.ledger.balance("user"), paid - tok(250));
    EXPECT_EQ(code_of([&] { env.pool.release(id, 2, env.registry, env.ledger); }), Errc::UnknownInstance);
}

TEST(Extend, Examples)
{
    Env env;
    auto a = reg("a", "eu", 100, 1);
    a.commitment_end = 30;
    add_active(env.registry, a);
    auto b = reg("b", "eu", 100, 1);
    b.commitment_end = 15;
    add_active(env.registry, b);
    auto id = env.deploy(std::vector{need("storage", 150)}).id;
    auto fee = env.pool.instance(id).per_epoch_fee();

    EXPECT_EQ(code_of([&] { env.pool.extend_reservation(id, 2, {{"a", true}, {"b", false}}, env.registry); }),
              Errc::ProviderDeclined);
    EXPECT_EQ(env.pool.instance(id).booked_until, 10u);
    EXPECT_EQ(code_of([&] { env.pool.extend_reservation(id, 6, {{"a", true}, {"b", true}}, env.registry); }),
              Errc::CommitmentTooShort);
    EXPECT_EQ(env.pool.extend_reservation(id, 5, {{"a", true}, {"b", true}}, env.registry), 15u);
    env.registry.set_reservation_price("a", tok(50));
    EXPECT_EQ(env.pool.instance(id).per_epoch_fee(), fee);
}

TEST(Expire, FreesWithoutCharge)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 1));
    env.deploy(std::vector{need("storage", 10)}, 3);
    auto balance = env.ledger.balance("user");
    EXPECT_TRUE(env.pool.expire(2, env.registry).empty());
    auto gone = env.pool.expire(3, env.registry);
    EXPECT_EQ(gone.size(), 1u);
    EXPECT_EQ(env.ledger.balance("user"), balance);
    EXPECT_EQ(env.registry.node("a").free(rt("storage")), 100u);
}

TEST(Bill, DefaultReleasesInstance)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 1));
    env.ledger.open_account("thin");
    env.ledger.transfer("user", "thin", tok(25));
    auto id = env.pool.deploy("thin", std::vector{need("storage", 10)}, 5, env.ctx(), env.registry, env.ledger).id;
    auto r = env.pool.bill(0, env.registry, env.ledger);
    EXPECT_TRUE(r.charged.empty());
    r = env.pool.bill(1, env.registry, env.ledger);
    EXPECT_EQ(r.charged, std::vector<InstanceId>{id});
    EXPECT_EQ(env.ledger.balance("thin"), tok(5));
    r = env.pool.bill(2, env.registry, env.ledger);
    EXPECT_EQ(r.defaulted, std::vector<InstanceId>{id});
    EXPECT_TRUE(env.pool.instances().empty());
    EXPECT_EQ(env.registry.node("a").free(rt("storage")), 100u);
}

TEST(PoolSnapshot, RoundTrips)
{
    Env env;
    add_active(env.registry, reg("a", "eu", 100, 2));
    env.pool.add_blueprint({"el", {need("storage", 20, {"eu"})}, ElasticBounds{Ratio(1, 2), Ratio(2, 1)}, {"svc"}});
    env.deploy(DeploySpec{"el"});
    env.deploy(std::vector{need("storage", 5)});
    auto doc = env.pool.to_json();
    EXPECT_EQ(ResourcePool::from_json(doc).to_json().dump(), doc.dump());
}
