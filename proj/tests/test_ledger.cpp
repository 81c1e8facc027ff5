#include "fixtures.hpp"
#include "icn/ledger.hpp"

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

std::uint64_t floor_frac(std::uint64_t x, std::uint64_t num, std::uint64_t den)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * num / den);
}

}  // namespace

TEST(LedgerTransfer, Examples)
{
    Ledger l({{"A", tok(100)}, {"B", tok(0)}});
    l.transfer("A", "B", tok(40));
    EXPECT_EQ(l.balance("A"), tok(60));
    EXPECT_EQ(l.balance("B"), tok(40));

    Ledger z({{"A", tok(100)}, {"B", tok(0)}});
    z.transfer("A", "B", tok(0));
    EXPECT_EQ(z.balance("A"), tok(100));
    EXPECT_EQ(z.balance("B"), tok(0));

    Ledger s({{"A", tok(10)}, {"B", tok(0)}});
    EXPECT_EQ(code_of([&] { s.transfer("A", "B", tok(11)); }), Errc::InsufficientBalance);
    EXPECT_EQ(code_of([&] { s.transfer("X", "B", tok(1)); }), Errc::UnknownAccount);
    EXPECT_TRUE(s.conservation_holds());
}

TEST(LedgerCollateral, LockAndRelease)
{
    Ledger l({{"o", tok(500)}});
    auto lock = l.lock_collateral("o", "n1", tok(300), 100);
    EXPECT_EQ(l.balance("o"), tok(200));
    EXPECT_EQ(lock.amount, tok(300));
    EXPECT_EQ(lock.locked_until, 100u);
    EXPECT_EQ(l.collateral_of("n1"), tok(300));

    for (int i = 0; i < 50; ++i)
        l.advance_epoch();
    EXPECT_EQ(code_of([&] { l.release_collateral(lock.id); }), Errc::StillLocked);
    EXPECT_EQ(code_of([&] { l.lock_collateral("o", "n1", tok(0), 100); }), Errc::InvalidAmount);
    EXPECT_EQ(code_of([&] { l.lock_collateral("o", "n1", tok(1), 50); }), Errc::InvalidDuration);
    EXPECT_EQ(code_of([&] { l.lock_collateral("o", "n1", tok(201), 60); }), Errc::InsufficientBalance);
    for (int i = 0; i < 50; ++i)
        l.advance_epoch();
    EXPECT_EQ(l.release_collateral(lock.id), tok(300));
    EXPECT_EQ(l.balance("o"), tok(500));
    EXPECT_TRUE(l.conservation_holds());
}

TEST(LedgerSlash, ZeroAndFull)
{
    Ledger l({{"o", tok(1000)}});
    l.lock_collateral("o", "n", tok(300), 10);
    auto zero = l.slash("n", Ratio::zero());
    EXPECT_EQ(zero.total_burned, tok(0));
    EXPECT_EQ(l.collateral_of("n"), tok(300));
    auto full = l.slash("n", Ratio::one());
    EXPECT_EQ(full.total_burned, tok(300));
    EXPECT_EQ(l.collateral_of("n"), tok(0));
    EXPECT_EQ(l.burned_total(), tok(300));
    EXPECT_TRUE(l.conservation_holds());
}

TEST(LedgerSlash, QuarterOverLockAndStake)
{
    Ledger l({{"o", tok(1000)}, {"s", tok(1000)}});
    l.lock_collateral("o", "n", tok(300), 10);
    l.stake("s", "n", tok(100));
    auto out = l.slash("n", Ratio(1, 4));
    std::uint64_t expected = floor_frac(300, 1, 4) + floor_frac(100, 1, 4);
    EXPECT_EQ(out.total_burned.value(), expected);
    EXPECT_EQ(out.total_burned, tok(100));
    EXPECT_EQ(l.collateral_of("n"), tok(225));
    EXPECT_EQ(l.stake_of("n"), tok(75));
    EXPECT_TRUE(l.conservation_holds());
}

TEST(LedgerSlash, Errors)
{
    Ledger l({{"o", tok(1000)}});
    EXPECT_EQ(code_of([&] { l.slash("ghost", Ratio(1, 2)); }), Errc::UnknownNode);
    l.lock_collateral("o", "n", tok(10), 5);
    EXPECT_EQ(code_of([&] { l.slash("n", Ratio(3, 2)); }), Errc::SeverityOutOfRange);
}

TEST(LedgerSlash, FloorsEachPositionSeparately)
{
    Ledger l({{"o", tok(1000)}});
    l.lock_collateral("o", "n", tok(7), 5);
    l.lock_collateral("o", "n", tok(7), 5);
    auto out = l.slash("n", Ratio(1, 2));
    EXPECT_EQ(out.total_burned.value(), 2 * floor_frac(7, 1, 2));
}

TEST(LedgerNft, MintAndStake)
{
    Ledger l({{"o", tok(5000)}});
    auto pass = l.mint_nft("o", tok(1000), 100);
    EXPECT_EQ(pass.sink_value, tok(1000));
    EXPECT_EQ(pass.decay_multiplier, Ratio::one());
    EXPECT_FALSE(pass.staked_to);
    EXPECT_EQ(l.nft_security(pass.id), tok(0));
    EXPECT_EQ(code_of([&] { l.mint_nft("o", tok(0), 10); }), Errc::InvalidParameters);
    EXPECT_EQ(code_of([&] { l.mint_nft("o", tok(10), 0); }), Errc::InvalidParameters);
    EXPECT_TRUE(l.conservation_holds());

    const auto& staked = l.stake_nft(pass.id, "n");
    EXPECT_EQ(staked.staked_to, std::optional<NodeId>("n"));
    EXPECT_EQ(l.security_of("n"), tok(1000));
    EXPECT_EQ(code_of([&] { l.stake_nft(pass.id, "m"); }), Errc::AlreadyStaked);

    auto second = l.mint_nft("o", tok(100), 10);
    EXPECT_EQ(code_of([&] { l.stake_nft(second.id, "n"); }), Errc::NodeOccupied);
}

TEST(LedgerNft, DecayOneEpoch)
{
    Ledger l({{"o", tok(1000)}});
    auto pass = l.mint_nft("o", tok(1000), 100);
    l.stake_nft(pass.id, "n");
    auto before = l.balance("o");
    l.advance_epoch();
    std::uint64_t step = 1000 / 100;
    EXPECT_EQ(l.nft(pass.id).sink_value.value(), 1000 - step);
    EXPECT_EQ(l.balance("o").value(), before.value() + step);
    EXPECT_TRUE(l.conservation_holds());
}

TEST(LedgerNft, UnstakedPassDoesNotDecay)
{
    Ledger l({{"o", tok(1000)}});
    auto pass = l.mint_nft("o", tok(1000), 100);
    for (int i = 0; i < 50; ++i)
        l.advance_epoch();
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(1000));
}

TEST(LedgerNft, ClampsFinalStepAndExhausts)
{
    Ledger l({{"o", tok(1000)}});
    auto pass = l.mint_nft("o", tok(1000), 100);
    l.stake_nft(pass.id, "n");
    for (int i = 0; i < 98; ++i)
        l.advance_epoch();
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(20));
    // 1.25 * 10 = 12.5 per epoch: 12 forfeited now, the next step exceeds the 8 left.
    l.slash("n", Ratio(1, 4));
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(8));
    auto before = l.balance("o");
    l.advance_epoch();
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(0));
    EXPECT_EQ(l.balance("o"), before + tok(8));
    EXPECT_FALSE(l.nft(pass.id).staked_to);
    EXPECT_EQ(l.security_of("n"), tok(0));

    auto spent = l.nft(pass.id);
    EXPECT_EQ(code_of([&] { l.stake_nft(spent.id, "m"); }), Errc::FullyDecayed);
}

TEST(LedgerNft, SinkThreeStepTen)
{
    Ledger l({{"o", tok(1000)}});
    auto pass = l.mint_nft("o", tok(1000), 100);
    l.stake_nft(pass.id, "n");
    // Rewrite the snapshot so the pass holds 3 while its step is 10.
    auto doc = l.to_json();
    for (auto& p : doc["nfts"])
        p["sink_value"] = "3";
    doc["balances"]["o"] = "997";
    auto m = Ledger::from_json(doc);
    ASSERT_TRUE(m.conservation_holds());
    auto summary = m.advance_epoch();
    ASSERT_EQ(summary.payouts.size(), 1u);
    EXPECT_EQ(summary.payouts[0].amount, tok(3));
    EXPECT_EQ(m.nft(pass.id).sink_value, tok(0));
    EXPECT_EQ(m.balance("o"), tok(1000));
}

TEST(LedgerNft, SlashMultipliesDecayAndForfeitsAStep)
{
    Ledger l({{"o", tok(10000)}});
    auto pass = l.mint_nft("o", tok(1000), 100);
    l.stake_nft(pass.id, "n");
    auto out = l.slash("n", Ratio(1, 2));
    EXPECT_EQ(out.accelerated_nft, std::optional<NftId>(pass.id));
    EXPECT_EQ(l.nft(pass.id).decay_multiplier, Ratio(3, 2));
    // floor(1.5 * 1000 / 100) = 15 forfeited at once
    EXPECT_EQ(out.nft_burn, tok(15));
    EXPECT_EQ(out.total_burned, tok(15));
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(985));
    l.advance_epoch();
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(970));
    EXPECT_EQ(l.balance("o"), tok(10000 - 1000 + 15));
    l.slash("n", Ratio(1, 3));
    EXPECT_EQ(l.nft(pass.id).decay_multiplier, Ratio(2, 1));
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(950));
    EXPECT_TRUE(l.conservation_holds());
}

TEST(LedgerNft, MultiplierRoundsUpToPpm)
{
    Ledger l({{"o", tok(10000)}});
    auto pass = l.mint_nft("o", tok(7), 3);
    l.stake_nft(pass.id, "n");
    l.slash("n", Ratio(1, 3'000'000));
    EXPECT_EQ(l.nft(pass.id).decay_multiplier, Ratio(1'000'001, 1'000'000));
    EXPECT_EQ(l.nft(pass.id).sink_value, tok(5));
    auto zero = l.slash("n", Ratio::zero());
    EXPECT_FALSE(zero.accelerated_nft.has_value());
    EXPECT_TRUE(zero.total_burned.is_zero());
}

TEST(LedgerAnchors, UniquenessAndAuthorization)
{
    Ledger l({{"h", tok(1)}});
    l.authorize_submitter("h");
    Digest root{};
    root[0] = 1;
    auto id = l.record_proof_anchor("h", "N", 5, root);
    EXPECT_EQ(l.anchor(id).root, root);
    EXPECT_EQ(code_of([&] { l.record_proof_anchor("h", "N", 5, root); }), Errc::DuplicateAnchor);
    EXPECT_EQ(code_of([&] { l.record_proof_anchor("x", "N", 6, root); }), Errc::UnauthorizedSubmitter);
    EXPECT_EQ(code_of([&] { l.anchor(42); }), Errc::UnknownAnchor);
    l.record_proof_anchor("h", "N", 6, root);
    EXPECT_EQ(l.anchors().size(), 2u);
}

TEST(LedgerEmission, EmitAndBurnKeepIdentity)
{
    Ledger l({{"a", tok(100)}});
    l.open_account("b");
    l.emit("b", tok(50));
    l.burn("a", tok(30));
    EXPECT_EQ(l.emitted_total(), tok(50));
    EXPECT_EQ(l.burned_total(), tok(30));
    EXPECT_EQ(l.accounted_total(), l.genesis_supply() + l.emitted_total());
    EXPECT_TRUE(l.conservation_holds());
}

TEST(LedgerSnapshot, RoundTripsExactly)
{
    Ledger l({{"o", tok(5000)}, {"s", tok(300)}});
    l.lock_collateral("o", "n", tok(700), 9);
    l.stake("s", "n", tok(120));
    auto pass = l.mint_nft("o", tok(1000), 7);
    l.stake_nft(pass.id, "n");
    l.slash("n", Ratio(1, 3));
    l.advance_epoch();
    l.authorize_submitter("h");
    l.record_proof_anchor("h", "n", 0, Digest{});
    auto doc = l.to_json();
    auto back = Ledger::from_json(doc);
    EXPECT_EQ(back.to_json().dump(), doc.dump());
    EXPECT_EQ(back.nft(pass.id).decay_carry, l.nft(pass.id).decay_carry);
    back.advance_epoch();
    l.advance_epoch();
    EXPECT_EQ(back.to_json().dump(), l.to_json().dump());
}
