#pragma once

// Frame-synchronous simulation engines with exact AoI time averaging.
//
// AoI is sampled at frame boundaries and grows with slope 1 inside a frame.
// A node decoded in a frame restarts the next frame at m (its update carries
// the frame-start timestamp and is delivered once the frame is buffered);
// every other node restarts at its previous value plus m. All nodes start
// at m.

#include "core.hpp"
#include "decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace atirsa
{
    /// Time-integral of each node's AoI over the measurement window.
    struct AoiAccumulator
    {
        std::vector<double> per_node_area;
        std::vector<std::uint64_t> per_node_update_count;
        std::uint64_t window_slots = 0;

        explicit AoiAccumulator(std::size_t num_users = 0) : per_node_area(num_users, 0.0), per_node_update_count(num_users, 0) {}

        /// Network average of area / window, or +inf for an empty window.
        double average_aoi() const
        {
            if (window_slots == 0 || per_node_area.empty())
            {
                return kDivergentAoi;
            }
            const double total = std::accumulate(per_node_area.begin(), per_node_area.end(), 0.0);
            return total / static_cast<double>(per_node_area.size()) / static_cast<double>(window_slots);
        }

        void merge(const AoiAccumulator &other)
        {
            if (other.per_node_area.size() != per_node_area.size())
            {
                throw std::invalid_argument("AoiAccumulator::merge: population mismatch");
            }
            for (std::size_t u = 0; u < per_node_area.size(); ++u)
            {
                per_node_area[u] += other.per_node_area[u];
                per_node_update_count[u] += other.per_node_update_count[u];
            }
            window_slots += other.window_slots;
        }
    };

    /// Area under one frame of a sawtooth that starts the frame at `aoi_start`.
    inline constexpr double frame_area(std::uint64_t aoi_start, std::uint32_t frame_slots) noexcept
    {
        const double m = frame_slots;
        return m * static_cast<double>(aoi_start) + 0.5 * m * m;
    }

    /// Adds one frame to the accumulator. `aoi_slots[u]` is node u's AoI at
    /// the start of the frame; `decoded` lists the nodes delivered in it.
    inline void accumulate_aoi(std::span<const std::uint64_t> aoi_slots, std::span<const UserId> decoded, std::uint32_t frame_slots,
                               AoiAccumulator &acc)
    {
        if (acc.per_node_area.size() != aoi_slots.size())
        {
            throw std::invalid_argument("accumulate_aoi: accumulator population mismatch");
        }
        for (std::size_t u = 0; u < aoi_slots.size(); ++u)
        {
            acc.per_node_area[u] += frame_area(aoi_slots[u], frame_slots);
        }
        for (auto u : decoded)
        {
            ++acc.per_node_update_count[u];
        }
        acc.window_slots += frame_slots;
    }

    inline void accumulate_aoi(std::span<const NodeState> states, std::span<const UserId> decoded, std::uint32_t frame_slots, AoiAccumulator &acc)
    {
        std::vector<std::uint64_t> aoi(acc.per_node_area.size(), 0);
        for (const auto &s : states)
        {
            if (s.user >= aoi.size())
            {
                throw std::invalid_argument("accumulate_aoi: user id out of range");
            }
            aoi[s.user] = s.aoi_slots;
        }
        accumulate_aoi(aoi, decoded, frame_slots, acc);
    }

    /// Frame-boundary AoI update: decoded nodes go to m, all others gain m.
    inline void advance_aoi(std::span<std::uint64_t> aoi_slots, std::span<const UserId> decoded, std::uint32_t frame_slots)
    {
        for (auto &a : aoi_slots)
        {
            a += frame_slots;
        }
        for (auto u : decoded)
        {
            aoi_slots[u] = frame_slots;
        }
    }

    inline std::uint64_t required_transmitters(std::uint32_t frame_slots, double target_load)
    {
        return static_cast<std::uint64_t>(std::ceil(frame_slots * target_load - 1e-9));
    }

    /// Receiver threshold rule: the largest theta among 0 and the AoI values
    /// present such that more than ceil(m G*) - 1 nodes have AoI strictly above
    /// it; barring probability m G* / n(theta).
    inline ThresholdFeedback compute_threshold(std::span<const std::uint64_t> aoi_values, std::uint32_t frame_slots, double target_load)
    {
        const std::uint64_t need = required_transmitters(frame_slots, target_load);
        if (need < 1 || need > aoi_values.size())
        {
            throw std::invalid_argument("compute_threshold: m*G* must lie in (0, U]");
        }
        // The need-th largest AoI; any candidate strictly below it admits at
        // least `need` nodes, any candidate at or above it admits fewer.
        std::vector<std::uint64_t> v(aoi_values.begin(), aoi_values.end());
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(need - 1), v.end(), std::greater<>{});
        const std::uint64_t pivot = v[need - 1];
        std::uint64_t theta = 0;
        for (auto a : aoi_values)
        {
            if (a < pivot && a > theta)
            {
                theta = a;
            }
        }
        const auto eligible = static_cast<std::uint64_t>(std::count_if(aoi_values.begin(), aoi_values.end(), [theta](auto a) { return a > theta; }));
        return {theta, frame_slots * target_load / static_cast<double>(eligible), eligible};
    }

    /// Same rule evaluated from a histogram of ages in frames
    /// (`age_histogram[k]` nodes have AoI k*m).
    inline ThresholdFeedback compute_threshold_from_histogram(std::span<const std::uint64_t> age_histogram, std::uint32_t frame_slots, double target_load)
    {
        const std::uint64_t need = required_transmitters(frame_slots, target_load);
        const std::uint64_t total = std::accumulate(age_histogram.begin(), age_histogram.end(), std::uint64_t{0});
        if (need < 1 || need > total)
        {
            throw std::invalid_argument("compute_threshold: m*G* must lie in (0, U]");
        }
        std::uint64_t above = 0;
        for (std::size_t k = age_histogram.size(); k-- > 1;)
        {
            if (age_histogram[k] > 0 && above >= need)
            {
                return {k * frame_slots, frame_slots * target_load / static_cast<double>(above), above};
            }
            above += age_histogram[k];
        }
        // theta = 0 admits everyone with positive AoI.
        return {0, frame_slots * target_load / static_cast<double>(above), above};
    }

    /// Per-frame view handed to an observer. For slotted ALOHA a frame is one
    /// slot and `aoi_after` is empty.
    struct FrameReport
    {
        std::uint64_t frame = 0;
        bool measured = false;
        std::uint64_t transmitters = 0;
        std::span<const UserId> decoded;
        std::uint64_t theta = 0;
        double access_probability = 0.0;
        std::span<const std::uint64_t> aoi_after;
    };

    using FrameObserver = std::function<void(const FrameReport &)>;

    enum class ThresholdPolicy
    {
        Adaptive, // the receiver threshold rule
        Uniform,  // theta = 0, p = m G* / U
    };

    namespace detail
    {
        inline FrameOccupancy build_frame(std::span<const UserId> users, const SimConfig &cfg, Stream &stream)
        {
            FrameOccupancy frame;
            frame.frame_slots = cfg.frame_slots;
            frame.transmissions.reserve(users.size());
            for (auto u : users)
            {
                const unsigned degree = sample_degree(cfg.distribution, stream);
                frame.transmissions.push_back({u, place_replicas(degree, cfg.frame_slots, stream)});
            }
            return frame;
        }

        inline RunMetrics finish(const SimConfig &cfg, const AoiAccumulator &acc, std::uint64_t slots_per_frame, std::uint64_t transmissions,
                                 std::uint64_t decoded)
        {
            RunMetrics r;
            r.measured_frames = cfg.measured_frames();
            const double window = static_cast<double>(r.measured_frames * slots_per_frame);
            r.transmissions = transmissions;
            r.decoded = decoded;
            r.throughput = decoded / window;
            r.realized_load = transmissions / window;
            r.per_frame_success_prob = transmissions ? static_cast<double>(decoded) / transmissions : 0.0;
            r.avg_network_aoi = decoded ? acc.average_aoi() : kDivergentAoi;
            r.normalized_aoi = r.avg_network_aoi / cfg.num_users;
            return r;
        }

        template <typename ChooseTransmitters>
        RunMetrics run_frames(const SimConfig &cfg, Stream &stream, ChooseTransmitters &&choose, const FrameObserver &observer)
        {
            const std::uint32_t m = cfg.frame_slots;
            std::vector<std::uint64_t> aoi(cfg.num_users, m);
            AoiAccumulator acc(cfg.num_users);
            std::uint64_t transmissions = 0;
            std::uint64_t decoded = 0;
            std::vector<UserId> active;
            for (std::uint64_t f = 0; f < cfg.total_frames; ++f)
            {
                active.clear();
                const auto [theta, p] = choose(std::span<const std::uint64_t>(aoi), active, stream);
                const FrameOccupancy frame = build_frame(active, cfg, stream);
                const DecodeOutcome outcome = decode_frame(frame);
                const bool measured = f >= cfg.warmup_frames;
                if (measured)
                {
                    accumulate_aoi(aoi, outcome.decoded_users, m, acc);
                    transmissions += active.size();
                    decoded += outcome.decoded_users.size();
                }
                advance_aoi(aoi, outcome.decoded_users, m);
                if (observer)
                {
                    observer(FrameReport{f, measured, active.size(), outcome.decoded_users, theta, p, aoi});
                }
            }
            return finish(cfg, acc, m, transmissions, decoded);
        }
    }

    /// Plain IRSA: every node transmits independently with probability
    /// G m / U in every frame.
    inline RunMetrics run_irsa(const SimConfig &cfg, Stream &stream, const FrameObserver &observer = {})
    {
        validate_config(cfg);
        if (cfg.protocol != Protocol::Irsa)
        {
            throw std::invalid_argument("run_irsa: protocol must be irsa");
        }
        const double q = std::min(1.0, cfg.target_load * cfg.frame_slots / cfg.num_users);
        auto choose = [&](std::span<const std::uint64_t>, std::vector<UserId> &active, Stream &s) {
            const auto count = static_cast<std::uint32_t>(s.binomial(cfg.num_users, q));
            active = sample_subset(count, cfg.num_users, s);
            return std::pair<std::uint64_t, double>{0, q};
        };
        return detail::run_frames(cfg, stream, choose, observer);
    }

    inline RunMetrics run_irsa(const SimConfig &cfg, const FrameObserver &observer = {})
    {
        Stream stream(derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamPurpose::Simulation)}));
        return run_irsa(cfg, stream, observer);
    }

    /// Age-threshold IRSA. Before each frame the receiver derives (theta, p)
    /// from the AoI vector at the preceding boundary; nodes with AoI above
    /// theta transmit with probability p, all others stay silent.
    inline RunMetrics run_at_irsa(const SimConfig &cfg, Stream &stream, const FrameObserver &observer = {},
                                  ThresholdPolicy policy = ThresholdPolicy::Adaptive)
    {
        validate_config(cfg);
        if (cfg.protocol != Protocol::AtIrsa)
        {
            throw std::invalid_argument("run_at_irsa: protocol must be at-irsa");
        }
        const std::uint32_t m = cfg.frame_slots;
        std::vector<std::uint64_t> histogram;
        auto choose = [&](std::span<const std::uint64_t> aoi, std::vector<UserId> &active, Stream &s) {
            ThresholdFeedback fb{0, cfg.target_load * m / cfg.num_users, cfg.num_users};
            if (policy == ThresholdPolicy::Adaptive)
            {
                histogram.assign(histogram.size(), 0);
                for (auto a : aoi)
                {
                    const std::uint64_t k = a / m;
                    if (k >= histogram.size())
                    {
                        histogram.resize(k + 1, 0);
                    }
                    ++histogram[k];
                }
                fb = compute_threshold_from_histogram(histogram, m, cfg.target_load);
            }
            for (UserId u = 0; u < aoi.size(); ++u)
            {
                if (aoi[u] > fb.threshold_slots && s.bernoulli(fb.barring_probability))
                {
                    active.push_back(u);
                }
            }
            return std::pair<std::uint64_t, double>{fb.threshold_slots, fb.barring_probability};
        };
        return detail::run_frames(cfg, stream, choose, observer);
    }

    inline RunMetrics run_at_irsa(const SimConfig &cfg, const FrameObserver &observer = {}, ThresholdPolicy policy = ThresholdPolicy::Adaptive)
    {
        Stream stream(derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamPurpose::Simulation)}));
        return run_at_irsa(cfg, stream, observer, policy);
    }

    /// Slotted ALOHA with access probability 1/U. One slot per step; a slot
    /// succeeds iff exactly one node transmits, resetting its AoI to 1.
    /// The sawtooth integral is evaluated in closed form per inter-update
    /// interval, which equals per-slot trapezoid accumulation exactly.
    inline RunMetrics run_slotted_aloha(const SimConfig &cfg, Stream &stream, const FrameObserver &observer = {})
    {
        validate_config(cfg);
        if (cfg.protocol != Protocol::SlottedAloha)
        {
            throw std::invalid_argument("run_slotted_aloha: protocol must be sa");
        }
        const std::uint32_t n = cfg.num_users;
        const double q = 1.0 / n;
        const std::uint64_t window_start = cfg.warmup_frames;
        std::vector<std::uint64_t> anchor_slot(n, 0);
        std::vector<std::uint64_t> anchor_aoi(n, 1);
        AoiAccumulator acc(n);

        // Area over slots [from, to) for a node anchored at (slot, aoi).
        auto close = [&](UserId u, std::uint64_t to) {
            const std::uint64_t from = std::max(anchor_slot[u], window_start);
            if (to <= from)
            {
                return;
            }
            const double start = static_cast<double>(anchor_aoi[u] + (from - anchor_slot[u]));
            const double k = static_cast<double>(to - from);
            acc.per_node_area[u] += k * start + 0.5 * k * k;
        };

        std::uint64_t transmissions = 0;
        std::uint64_t decoded = 0;
        for (std::uint64_t t = 0; t < cfg.total_frames; ++t)
        {
            const std::uint64_t k = stream.binomial(n, q);
            const bool measured = t >= window_start;
            UserId winner = 0;
            if (k == 1)
            {
                winner = static_cast<UserId>(stream.below(n));
                close(winner, t + 1);
                anchor_slot[winner] = t + 1;
                anchor_aoi[winner] = 1;
                if (measured)
                {
                    ++acc.per_node_update_count[winner];
                    ++decoded;
                }
            }
            if (measured)
            {
                transmissions += k;
            }
            if (observer)
            {
                observer(FrameReport{t, measured, k, k == 1 ? std::span<const UserId>(&winner, 1) : std::span<const UserId>{}, 0, q, {}});
            }
        }
        for (UserId u = 0; u < n; ++u)
        {
            close(u, cfg.total_frames);
        }
        acc.window_slots = cfg.total_frames - window_start;
        return detail::finish(cfg, acc, 1, transmissions, decoded);
    }

    inline RunMetrics run_slotted_aloha(const SimConfig &cfg, const FrameObserver &observer = {})
    {
        Stream stream(derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamPurpose::Simulation)}));
        return run_slotted_aloha(cfg, stream, observer);
    }

    inline RunMetrics run_protocol(const SimConfig &cfg, const FrameObserver &observer = {})
    {
        switch (cfg.protocol)
        {
        case Protocol::SlottedAloha:
            return run_slotted_aloha(cfg, observer);
        case Protocol::Irsa:
            return run_irsa(cfg, observer);
        case Protocol::AtIrsa:
            return run_at_irsa(cfg, observer);
        }
        throw std::invalid_argument("unknown protocol");
    }
}
