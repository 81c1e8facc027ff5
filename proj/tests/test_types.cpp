#include "icn/types.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace icn;

TEST(TokenAmount, CheckedArithmetic)
{
    TokenAmount a(10);
    a += TokenAmount(5);
    EXPECT_EQ(a.value(), 15u);
    EXPECT_THROW(a -= TokenAmount(16), ProtocolError);
    TokenAmount max(UINT64_MAX);
    EXPECT_THROW(max += TokenAmount(1), ProtocolError);
    EXPECT_THROW(TokenAmount(UINT64_MAX / 2 + 1).times(2), ProtocolError);
    EXPECT_EQ(TokenAmount::parse("18446744073709551615").value(), UINT64_MAX);
    EXPECT_THROW(TokenAmount::parse("-1"), ProtocolError);
    EXPECT_THROW(TokenAmount::parse("12x"), ProtocolError);
}

TEST(Ratio, ParsesAndReduces)
{
    EXPECT_EQ(Ratio::parse("6/8"), Ratio(3, 4));
    EXPECT_EQ(Ratio::parse("0.25"), Ratio(1, 4));
    EXPECT_EQ(Ratio::parse("0.7"), Ratio(7, 10));
    EXPECT_EQ(Ratio::parse("2"), Ratio(2, 1));
    EXPECT_EQ(Ratio(3, 4).to_string(), "3/4");
    EXPECT_EQ(Ratio(4, 2).to_string(), "2");
    EXPECT_THROW(Ratio(1, 0), ProtocolError);
    EXPECT_THROW(Ratio::parse("a/b"), ProtocolError);
}

TEST(Ratio, FloorAndCeilMatchWideOracle)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        std::uint64_t den = rng() % 1'000'000 + 1;
        std::uint64_t num = rng() % (2 * den + 1);
        std::uint64_t x = rng();
        Ratio q(num, den);
        unsigned __int128 prod = static_cast<unsigned __int128>(x) * num;
        auto floor_oracle = static_cast<std::uint64_t>(prod / den);
        if (prod / den > UINT64_MAX)
            continue;
        EXPECT_EQ(q.floor_mul(x), floor_oracle);
        auto ceil_oracle = prod % den == 0 ? floor_oracle : floor_oracle + 1;
        if (ceil_oracle >= floor_oracle)
            EXPECT_EQ(q.ceil_mul(x), ceil_oracle);
    }
}

TEST(Ratio, OrderingIsExact)
{
    EXPECT_LT(Ratio(1, 3), Ratio(334, 1000));
    EXPECT_GT(Ratio(1, 3), Ratio(333, 1000));
    EXPECT_EQ(Ratio(2, 6) <=> Ratio(1, 3), std::strong_ordering::equal);
    EXPECT_EQ(Ratio(1, 2) + Ratio(1, 3), Ratio(5, 6));
    EXPECT_EQ(Ratio(2, 3) * Ratio(3, 4), Ratio(1, 2));
}

TEST(Ratio, HugeProductRoundsDown)
{
    Ratio a(UINT64_MAX - 1, UINT64_MAX);
    Ratio b(UINT64_MAX - 2, UINT64_MAX - 1);
    Ratio p = a * b;
    EXPECT_LE(p, a);
    EXPECT_LE(p, b);
    EXPECT_GT(p, Ratio(999'999, 1'000'000));
}

TEST(ResourceType, RoundTrip)
{
    auto t = ResourceType::parse("storage:fast");
    EXPECT_EQ(t.kind, ResourceKind::Storage);
    EXPECT_EQ(t.subclass, "fast");
    EXPECT_EQ(t.to_string(), "storage:fast");
    EXPECT_EQ(ResourceType::parse("networking").to_string(), "networking");
    EXPECT_THROW(ResourceType::parse("gpu"), ProtocolError);
    EXPECT_LT(ResourceType::parse("storage"), ResourceType::parse("storage:fast"));
}
