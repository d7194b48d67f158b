#include "oracles.hpp"

#include <atirsa/decoder.hpp>

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace atirsa;

namespace
{
    // Users 1..4 over a 5-slot frame, slots given 1-based as in the figure.
    FrameOccupancy figure_one_frame()
    {
        auto zero_based = [](std::vector<SlotIndex> s) {
            for (auto &x : s)
                --x;
            return s;
        };
        return {5, {{1, zero_based({1, 4, 5})}, {2, zero_based({1, 2, 5})}, {3, zero_based({2, 3, 4})}, {4, zero_based({2, 5})}}};
    }

    FrameOccupancy random_frame(Stream &s, std::uint32_t m, std::uint32_t users, unsigned max_degree)
    {
        FrameOccupancy f;
        f.frame_slots = m;
        for (UserId u = 0; u < users; ++u)
        {
            const unsigned d = 1 + static_cast<unsigned>(s.below(std::min(max_degree, m)));
            f.transmissions.push_back({u, place_replicas(d, m, s)});
        }
        return f;
    }

    std::set<UserId> as_set(const std::vector<UserId> &v) { return {v.begin(), v.end()}; }
}

TEST(ClassifySlots, Examples)
{
    EXPECT_EQ(classify_slots(figure_one_frame()), (SlotCensus{0, 1, 4}));
    EXPECT_EQ(classify_slots({5, {}}), (SlotCensus{5, 0, 0}));
    EXPECT_EQ(classify_slots({5, {{7, {0, 2, 4}}}}), (SlotCensus{2, 3, 0}));
}

TEST(DecodeFrame, FigureOneWalkthrough)
{
    const auto out = decode_frame(figure_one_frame());
    EXPECT_EQ(out.decoded_users, (std::vector<UserId>{1, 2, 3, 4}));
    ASSERT_EQ(out.decode_order.size(), 4u);
    EXPECT_EQ(out.decode_order[0], (PeelEvent{1, 3, 2}));
    EXPECT_EQ(out.decode_order[1], (PeelEvent{1, 1, 3}));
    EXPECT_EQ(out.decode_order[2], (PeelEvent{2, 2, 0}));
    EXPECT_EQ(out.decode_order[3], (PeelEvent{2, 4, 1}));
    EXPECT_EQ(out.residual_collided_slots, 0u);

    std::ostringstream trace;
    write_trace(trace, out);
    EXPECT_EQ(trace.str(), "1,3,3\n1,1,4\n2,2,1\n2,4,2\n");
}

TEST(DecodeFrame, EmptyFrame)
{
    const auto out = decode_frame({5, {}});
    EXPECT_TRUE(out.decoded_users.empty());
    EXPECT_TRUE(out.decode_order.empty());
    EXPECT_EQ(out.residual_collided_slots, 0u);
}

TEST(DecodeFrame, SmallestStoppingSet)
{
    const auto out = decode_frame({4, {{1, {0, 1}}, {2, {0, 1}}}});
    EXPECT_TRUE(out.decoded_users.empty());
    EXPECT_EQ(out.residual_collided_slots, 2u);
}

TEST(DecodeFrame, PartialDecodeLeavesStoppingSet)
{
    // Users 1 and 2 form a stopping set; user 3 is clean.
    const auto out = decode_frame({6, {{1, {0, 1}}, {2, {0, 1}}, {3, {2, 5}}}});
    EXPECT_EQ(out.decoded_users, (std::vector<UserId>{3}));
    EXPECT_EQ(out.residual_collided_slots, 2u);
    ASSERT_EQ(out.decode_order.size(), 1u);
    EXPECT_EQ(out.decode_order[0].slot, 2u); // lowest singleton slot of user 3
}

TEST(DecodeFrame, MatchesBruteForcePeeler)
{
    Stream s(11);
    for (int i = 0; i < 2000; ++i)
    {
        const auto f = random_frame(s, 3 + static_cast<std::uint32_t>(s.below(12)), 1 + static_cast<std::uint32_t>(s.below(10)), 4);
        EXPECT_EQ(as_set(decode_frame(f).decoded_users), oracle::naive_peel(f));
    }
}

TEST(DecodeFrame, ScanOrderInvariance)
{
    Stream s(12);
    for (int i = 0; i < 10000; ++i)
    {
        const auto f = random_frame(s, 5 + static_cast<std::uint32_t>(s.below(40)), 1 + static_cast<std::uint32_t>(s.below(40)), 4);
        const auto up = decode_frame(f, ScanOrder::Ascending);
        const auto down = decode_frame(f, ScanOrder::Descending);
        ASSERT_EQ(up.decoded_users, down.decoded_users);
        ASSERT_EQ(up.residual_collided_slots, down.residual_collided_slots);
    }
}

TEST(DecodeFrame, EachEventResolvesASoleOccupant)
{
    Stream s(13);
    for (int i = 0; i < 2000; ++i)
    {
        const auto f = random_frame(s, 20, 15, 4);
        const auto out = decode_frame(f);
        std::set<UserId> cancelled;
        std::set<UserId> seen;
        for (const auto &e : out.decode_order)
        {
            ASSERT_TRUE(seen.insert(e.user).second);
            int occupants = 0;
            bool has_user = false;
            for (const auto &t : f.transmissions)
            {
                if (cancelled.count(t.user))
                    continue;
                if (std::find(t.slots.begin(), t.slots.end(), e.slot) != t.slots.end())
                {
                    ++occupants;
                    has_user |= t.user == e.user;
                }
            }
            ASSERT_EQ(occupants, 1);
            ASSERT_TRUE(has_user);
            cancelled.insert(e.user);
        }
        EXPECT_EQ(seen, as_set(out.decoded_users));
    }
}

TEST(DecodeFrame, ConservationAndCompleteness)
{
    Stream s(14);
    for (int i = 0; i < 5000; ++i)
    {
        const auto f = random_frame(s, 10, 1 + static_cast<std::uint32_t>(s.below(14)), 3);
        const auto out = decode_frame(f);
        const auto decoded = as_set(out.decoded_users);

        // Residual occupancy after cancelling every decoded user.
        std::vector<int> count(f.frame_slots, 0);
        for (const auto &t : f.transmissions)
            if (!decoded.count(t.user))
                for (auto x : t.slots)
                    ++count[x];
        std::uint32_t collided = 0;
        for (auto c : count)
        {
            ASSERT_NE(c, 1); // a leftover singleton would mean peeling stopped early
            collided += c >= 2;
        }
        EXPECT_EQ(collided, out.residual_collided_slots);
        for (const auto &t : f.transmissions)
        {
            if (decoded.count(t.user))
                continue;
            for (auto x : t.slots)
                EXPECT_GE(count[x], 2) << "undecoded user " << t.user << " in slot " << x;
        }

        if (classify_slots(f).singleton > 0)
        {
            EXPECT_FALSE(out.decoded_users.empty());
        }
    }
}

TEST(DecodeFrame, RemovingAUserNeverHurtsOthers)
{
    Stream s(15);
    for (int i = 0; i < 300; ++i)
    {
        const auto f = random_frame(s, 4 + static_cast<std::uint32_t>(s.below(5)), 2 + static_cast<std::uint32_t>(s.below(5)), 3);
        const auto full = oracle::naive_peel(f);
        ASSERT_EQ(as_set(decode_frame(f).decoded_users), full);
        const unsigned n = static_cast<unsigned>(f.transmissions.size());
        for (unsigned mask = 0; mask < (1u << n); ++mask)
        {
            FrameOccupancy sub{f.frame_slots, {}};
            for (unsigned k = 0; k < n; ++k)
                if (mask & (1u << k))
                    sub.transmissions.push_back(f.transmissions[k]);
            const auto got = as_set(decode_frame(sub).decoded_users);
            ASSERT_EQ(got, oracle::naive_peel(sub));
            for (const auto &t : sub.transmissions)
            {
                if (full.count(t.user))
                {
                    ASSERT_TRUE(got.count(t.user)) << "user " << t.user << " lost after removing others";
                }
            }
        }
    }
}
