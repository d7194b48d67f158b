#pragma once

// Test-only reference computations. Nothing here calls into the decoder or
// the engines; each oracle recomputes its quantity from first principles.

#include <atirsa/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace atirsa::oracle
{
    /// Peeling by brute force: recount every slot's undecoded occupants from
    /// scratch, decode the first singleton found, repeat.
    inline std::set<UserId> naive_peel(const FrameOccupancy &frame)
    {
        std::set<UserId> decoded;
        for (;;)
        {
            bool found = false;
            for (SlotIndex s = 0; s < frame.frame_slots && !found; ++s)
            {
                int occupants = 0;
                UserId who = 0;
                for (const auto &t : frame.transmissions)
                {
                    if (decoded.count(t.user))
                        continue;
                    if (std::find(t.slots.begin(), t.slots.end(), s) != t.slots.end())
                    {
                        ++occupants;
                        who = t.user;
                    }
                }
                if (occupants == 1)
                {
                    decoded.insert(who);
                    found = true;
                }
            }
            if (!found)
                return decoded;
        }
    }

    /// All k-subsets of {0..n-1}.
    inline std::vector<std::vector<SlotIndex>> all_subsets(unsigned n, unsigned k)
    {
        std::vector<std::vector<SlotIndex>> out;
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + k, true);
        do
        {
            std::vector<SlotIndex> s;
            for (unsigned i = 0; i < n; ++i)
                if (pick[i])
                    s.push_back(i);
            out.push_back(s);
        } while (std::prev_permutation(pick.begin(), pick.end()));
        return out;
    }

    /// Exact p_s for two users of fixed degree in an m-slot frame, by
    /// enumerating every equiprobable placement pair.
    inline double two_user_success_prob(unsigned m, unsigned degree)
    {
        const auto subsets = all_subsets(m, degree);
        double decoded = 0.0;
        double sent = 0.0;
        for (const auto &a : subsets)
        {
            for (const auto &b : subsets)
            {
                FrameOccupancy f{m, {{0, a}, {1, b}}};
                decoded += static_cast<double>(naive_peel(f).size());
                sent += 2.0;
            }
        }
        return decoded / sent;
    }

    /// E[A+B] and E[(A+B)^2] for B geometric on {0,1,...}, by direct series.
    inline std::pair<double, double> geometric_shift_moments(double a, double p, int terms = 20000)
    {
        double m1 = 0.0;
        double m2 = 0.0;
        double w = p;
        for (int b = 0; b < terms; ++b)
        {
            const double y = a + b;
            m1 += w * y;
            m2 += w * y * y;
            w *= 1.0 - p;
        }
        return {m1, m2};
    }

    /// Area of a sawtooth that starts at `start` and grows with slope 1 for
    /// `length` time units.
    inline double ramp_area(double start, double length) { return start * length + 0.5 * length * length; }
}
