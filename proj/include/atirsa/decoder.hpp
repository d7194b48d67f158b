#pragma once

// Receiver-side successive interference cancellation for one buffered frame.
//
// Slots are tracked by occupancy count and by the XOR of the indices of the
// transmissions still present; for a singleton slot the XOR is the index of
// its only occupant. Collisions are destructive: nothing is recovered from a
// slot holding two or more un-cancelled replicas.

#include "core.hpp"

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace atirsa
{
    struct SlotCensus
    {
        std::uint32_t idle = 0;
        std::uint32_t singleton = 0;
        std::uint32_t collided = 0;

        friend bool operator==(const SlotCensus &, const SlotCensus &) = default;
    };

    struct PeelEvent
    {
        std::uint32_t round = 0; // 1-based scan pass
        UserId user = 0;
        SlotIndex slot = 0; // 0-based resolving slot

        friend bool operator==(const PeelEvent &, const PeelEvent &) = default;
    };

    struct DecodeOutcome
    {
        std::vector<UserId> decoded_users; // ascending
        std::vector<PeelEvent> decode_order;
        std::uint32_t residual_collided_slots = 0;
    };

    enum class ScanOrder
    {
        Ascending,
        Descending,
    };

    inline SlotCensus classify_slots(const FrameOccupancy &frame)
    {
        std::vector<std::uint32_t> count(frame.frame_slots, 0);
        for (const auto &t : frame.transmissions)
        {
            for (auto s : t.slots)
            {
                ++count[s];
            }
        }
        SlotCensus c;
        for (auto n : count)
        {
            if (n == 0)
                ++c.idle;
            else if (n == 1)
                ++c.singleton;
            else
                ++c.collided;
        }
        return c;
    }

    /// Iterative peeling to the fixed point. Each round scans every slot once
    /// in `order`; a slot holding exactly one un-cancelled replica when it is
    /// visited is decoded on the spot and that user's replicas are removed
    /// everywhere. Rounds repeat until one finds no singleton. The decoded set
    /// does not depend on `order`; decode_order does.
    inline DecodeOutcome decode_frame(const FrameOccupancy &frame, ScanOrder order = ScanOrder::Ascending)
    {
        const std::uint32_t m = frame.frame_slots;
        const auto &tx = frame.transmissions;
        std::vector<std::uint32_t> count(m, 0);
        std::vector<std::uint32_t> xor_index(m, 0);
        for (std::uint32_t i = 0; i < tx.size(); ++i)
        {
            for (auto s : tx[i].slots)
            {
                ++count[s];
                xor_index[s] ^= i;
            }
        }

        DecodeOutcome out;
        std::uint32_t round = 0;
        bool progress = !tx.empty();
        while (progress)
        {
            progress = false;
            ++round;
            for (std::uint32_t k = 0; k < m; ++k)
            {
                const std::uint32_t s = order == ScanOrder::Ascending ? k : m - 1 - k;
                if (count[s] != 1)
                {
                    continue;
                }
                const std::uint32_t i = xor_index[s];
                out.decode_order.push_back({round, tx[i].user, s});
                for (auto r : tx[i].slots)
                {
                    --count[r];
                    xor_index[r] ^= i;
                }
                progress = true;
            }
        }

        out.decoded_users.reserve(out.decode_order.size());
        for (const auto &e : out.decode_order)
        {
            out.decoded_users.push_back(e.user);
        }
        std::sort(out.decoded_users.begin(), out.decoded_users.end());
        out.residual_collided_slots = static_cast<std::uint32_t>(std::count_if(count.begin(), count.end(), [](auto n) { return n >= 2; }));
        return out;
    }

    /// One `round,user,slot` line per peeling event; slots are printed 1-based.
    inline void write_trace(std::ostream &os, const DecodeOutcome &outcome)
    {
        for (const auto &e : outcome.decode_order)
        {
            os << e.round << ',' << e.user << ',' << (e.slot + 1) << '\n';
        }
    }
}
