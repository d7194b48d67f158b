#pragma once

// Domain types shared by the decoder, the simulation engines and the
// analytic models, plus degree-distribution handling and replica placement.

#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atirsa
{
    using UserId = std::uint32_t;
    using SlotIndex = std::uint32_t;

    struct DegreeEntry
    {
        unsigned degree = 0;
        double probability = 0.0;

        friend bool operator==(const DegreeEntry &, const DegreeEntry &) = default;
    };

    inline constexpr double kDistributionSumTolerance = 1e-12;

    /// Replica-count distribution Lambda(x) = sum_l Lambda_l x^l. Entries are
    /// kept sorted by degree; probabilities are stored exactly as given.
    class DegreeDistribution
    {
    public:
        static DegreeDistribution validate(std::vector<DegreeEntry> raw)
        {
            if (raw.empty())
            {
                throw std::invalid_argument("degree distribution: empty");
            }
            std::sort(raw.begin(), raw.end(), [](const auto &a, const auto &b) { return a.degree < b.degree; });
            double sum = 0.0;
            for (std::size_t i = 0; i < raw.size(); ++i)
            {
                const auto &e = raw[i];
                if (e.degree < 1)
                {
                    throw std::invalid_argument("degree distribution: degree must be >= 1");
                }
                if (i > 0 && raw[i - 1].degree == e.degree)
                {
                    throw std::invalid_argument("degree distribution: duplicate degree " + std::to_string(e.degree));
                }
                if (!(e.probability > 0.0) || !std::isfinite(e.probability))
                {
                    throw std::invalid_argument("degree distribution: probability of degree " + std::to_string(e.degree) + " must be > 0");
                }
                sum += e.probability;
            }
            if (std::abs(sum - 1.0) > kDistributionSumTolerance)
            {
                std::ostringstream os;
                os.precision(17);
                os << "degree distribution: probabilities sum to " << sum << ", expected 1";
                throw std::invalid_argument(os.str());
            }
            DegreeDistribution d;
            d.entries_ = std::move(raw);
            d.cumulative_.reserve(d.entries_.size());
            double acc = 0.0;
            for (const auto &e : d.entries_)
            {
                acc += e.probability;
                d.cumulative_.push_back(acc);
            }
            return d;
        }

        static DegreeDistribution regular(unsigned degree) { return validate({{degree, 1.0}}); }

        std::span<const DegreeEntry> entries() const noexcept { return entries_; }
        unsigned max_degree() const noexcept { return entries_.back().degree; }

        double mean_degree() const noexcept
        {
            double m = 0.0;
            for (const auto &e : entries_)
            {
                m += e.degree * e.probability;
            }
            return m;
        }

        /// Degree with the given cumulative rank u in [0, 1). The last entry
        /// absorbs any rounding slack in the cumulative sum.
        unsigned degree_at(double u) const noexcept
        {
            for (std::size_t i = 0; i + 1 < entries_.size(); ++i)
            {
                if (u < cumulative_[i])
                {
                    return entries_[i].degree;
                }
            }
            return entries_.back().degree;
        }

        friend bool operator==(const DegreeDistribution &a, const DegreeDistribution &b) { return a.entries_ == b.entries_; }

    private:
        DegreeDistribution() = default;

        std::vector<DegreeEntry> entries_;
        std::vector<double> cumulative_;
    };

    inline DegreeDistribution validate_distribution(std::vector<DegreeEntry> raw)
    {
        return DegreeDistribution::validate(std::move(raw));
    }

    /// Parses "degree:probability" pairs separated by commas, e.g. "2:0.5,3:0.5".
    inline DegreeDistribution parse_distribution(std::string_view text)
    {
        std::vector<DegreeEntry> raw;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            auto comma = text.find(',', pos);
            if (comma == std::string_view::npos)
            {
                comma = text.size();
            }
            const std::string item(text.substr(pos, comma - pos));
            const auto colon = item.find(':');
            if (colon == std::string::npos)
            {
                throw std::invalid_argument("degree distribution: expected degree:probability, got '" + item + "'");
            }
            try
            {
                std::size_t used = 0;
                const std::string deg_text = item.substr(0, colon);
                const std::string prob_text = item.substr(colon + 1);
                const long deg = std::stol(deg_text, &used);
                if (used != deg_text.size() || deg < 1)
                {
                    throw std::invalid_argument("bad degree");
                }
                const double prob = std::stod(prob_text, &used);
                if (used != prob_text.size())
                {
                    throw std::invalid_argument("bad probability");
                }
                raw.push_back({static_cast<unsigned>(deg), prob});
            }
            catch (const std::logic_error &)
            {
                throw std::invalid_argument("degree distribution: cannot parse '" + item + "'");
            }
            pos = comma + 1;
        }
        return validate_distribution(std::move(raw));
    }

    inline std::string format_distribution(const DegreeDistribution &dist)
    {
        std::ostringstream os;
        os.precision(17);
        bool first = true;
        for (const auto &e : dist.entries())
        {
            os << (first ? "" : ",") << e.degree << ':' << e.probability;
            first = false;
        }
        return os.str();
    }

    /// Draws a degree with probability Lambda_l. Consumes exactly one draw.
    inline unsigned sample_degree(const DegreeDistribution &dist, Stream &stream)
    {
        return dist.degree_at(stream.uniform01());
    }

    /// Uniformly random `count`-subset of [0, population), sorted ascending
    /// (Floyd's algorithm; consumes exactly `count` bounded draws).
    inline std::vector<std::uint32_t> sample_subset(std::uint32_t count, std::uint32_t population, Stream &stream)
    {
        if (count > population)
        {
            throw std::invalid_argument("sample_subset: count exceeds population");
        }
        std::vector<std::uint32_t> chosen;
        chosen.reserve(count);
        if (count <= 16)
        {
            for (std::uint32_t j = population - count; j < population; ++j)
            {
                const auto t = static_cast<std::uint32_t>(stream.below(std::uint64_t{j} + 1));
                const bool seen = std::find(chosen.begin(), chosen.end(), t) != chosen.end();
                chosen.push_back(seen ? j : t);
            }
        }
        else
        {
            std::vector<bool> mark(population, false);
            for (std::uint32_t j = population - count; j < population; ++j)
            {
                auto t = static_cast<std::uint32_t>(stream.below(std::uint64_t{j} + 1));
                if (mark[t])
                {
                    t = j;
                }
                mark[t] = true;
                chosen.push_back(t);
            }
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    /// Distinct slot indices for `degree` replicas, uniform over all
    /// degree-subsets of the frame.
    inline std::vector<SlotIndex> place_replicas(unsigned degree, std::uint32_t frame_slots, Stream &stream)
    {
        if (degree < 1 || degree > frame_slots)
        {
            throw std::invalid_argument("place_replicas: degree must be in [1, frame_slots]");
        }
        return sample_subset(degree, frame_slots, stream);
    }

    enum class Protocol
    {
        SlottedAloha,
        Irsa,
        AtIrsa,
    };

    inline std::string_view to_string(Protocol p)
    {
        switch (p)
        {
        case Protocol::SlottedAloha:
            return "sa";
        case Protocol::Irsa:
            return "irsa";
        case Protocol::AtIrsa:
            return "at-irsa";
        }
        return "?";
    }

    inline Protocol parse_protocol(std::string_view s)
    {
        if (s == "sa" || s == "slotted-aloha")
            return Protocol::SlottedAloha;
        if (s == "irsa")
            return Protocol::Irsa;
        if (s == "at-irsa" || s == "atirsa")
            return Protocol::AtIrsa;
        throw std::invalid_argument("unknown protocol '" + std::string(s) + "' (expected sa, irsa or at-irsa)");
    }

    /// Parameters of one simulation run. For slotted ALOHA the frame is a
    /// single slot, `frame_slots` and `target_load` are ignored, and
    /// `total_frames`/`warmup_frames` count slots.
    struct SimConfig
    {
        std::uint32_t num_users = 1;
        std::uint32_t frame_slots = 1;
        double target_load = 0.0;
        DegreeDistribution distribution = DegreeDistribution::regular(1);
        std::uint64_t total_frames = 1;
        std::uint64_t warmup_frames = 0;
        std::uint64_t seed = 0;
        Protocol protocol = Protocol::Irsa;

        std::uint64_t measured_frames() const noexcept { return total_frames - warmup_frames; }
    };

    /// Ten round-robin cycles, ceil(U / (m G)) frames each.
    inline std::uint64_t default_warmup(std::uint32_t num_users, std::uint32_t frame_slots, double target_load)
    {
        if (!(target_load > 0.0) || frame_slots == 0)
        {
            return 0;
        }
        return 10 * static_cast<std::uint64_t>(std::ceil(num_users / (frame_slots * target_load) - 1e-9));
    }

    inline void validate_config(const SimConfig &c)
    {
        auto fail = [](const std::string &what) { throw std::invalid_argument("invalid config: " + what); };
        if (c.num_users < 1)
            fail("num_users must be >= 1");
        if (c.total_frames < 1)
            fail("total_frames must be >= 1");
        if (c.warmup_frames >= c.total_frames)
            fail("warmup_frames must be < total_frames");
        if (c.protocol == Protocol::SlottedAloha)
        {
            return;
        }
        if (c.frame_slots < 1)
            fail("frame_slots must be >= 1");
        if (c.distribution.max_degree() > c.frame_slots)
            fail("max degree exceeds frame_slots");
        if (!std::isfinite(c.target_load) || c.target_load < 0.0)
            fail("target_load must be a non-negative number");
        if (c.protocol == Protocol::AtIrsa && !(c.target_load > 0.0))
            fail("target_load must be > 0 for at-irsa");
        if (c.target_load * c.frame_slots > c.num_users * (1.0 + 1e-12))
            fail("target_load * frame_slots exceeds num_users");
    }

    struct Transmission
    {
        UserId user = 0;
        std::vector<SlotIndex> slots;
    };

    /// Bipartite user-slot incidence of one contention frame.
    struct FrameOccupancy
    {
        std::uint32_t frame_slots = 0;
        std::vector<Transmission> transmissions;

        std::size_t user_count() const noexcept { return transmissions.size(); }
        double load() const noexcept { return frame_slots ? static_cast<double>(transmissions.size()) / frame_slots : 0.0; }
    };

    inline void validate_frame(const FrameOccupancy &f)
    {
        std::vector<UserId> ids;
        ids.reserve(f.transmissions.size());
        for (const auto &t : f.transmissions)
        {
            if (t.slots.empty())
                throw std::invalid_argument("frame: user " + std::to_string(t.user) + " has no replicas");
            std::vector<SlotIndex> s = t.slots;
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end())
                throw std::invalid_argument("frame: user " + std::to_string(t.user) + " repeats a slot");
            if (s.back() >= f.frame_slots)
                throw std::invalid_argument("frame: slot index out of range");
            ids.push_back(t.user);
        }
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw std::invalid_argument("frame: duplicate user id");
    }

    /// Instantaneous AoI of one terminal, in slots, sampled at frame boundaries.
    struct NodeState
    {
        UserId user = 0;
        std::uint64_t aoi_slots = 0;
    };

    /// (Theta, p) broadcast at each frame boundary.
    struct ThresholdFeedback
    {
        std::uint64_t threshold_slots = 0;
        double barring_probability = 1.0;
        std::uint64_t eligible_count = 0;
    };

    struct RunMetrics
    {
        double throughput = 0.0;
        double avg_network_aoi = 0.0;
        double normalized_aoi = 0.0;
        double realized_load = 0.0;
        double per_frame_success_prob = 0.0;
        std::uint64_t measured_frames = 0;
        std::uint64_t transmissions = 0;
        std::uint64_t decoded = 0;
    };

    inline constexpr double kDivergentAoi = std::numeric_limits<double>::infinity();
}
