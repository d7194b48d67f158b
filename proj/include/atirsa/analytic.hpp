#pragma once

// Closed-form AoI models and Monte Carlo estimation of the per-frame
// decoding probability.

#include "core.hpp"
#include "decoder.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace atirsa
{
    /// Average network AoI of IRSA with i.i.d. activation: m/2 + U/S slots.
    inline double irsa_aoi(double frame_slots, double num_users, double throughput)
    {
        if (!(throughput > 0.0))
        {
            throw std::invalid_argument("irsa_aoi: throughput must be > 0");
        }
        return frame_slots / 2.0 + num_users / throughput;
    }

    /// Average network AoI of slotted ALOHA: 1/2 + U/S slots.
    inline double sa_aoi(double num_users, double throughput)
    {
        if (!(throughput > 0.0))
        {
            throw std::invalid_argument("sa_aoi: throughput must be > 0");
        }
        return 0.5 + num_users / throughput;
    }

    /// Slotted ALOHA throughput with access probability 1/U:
    /// U (1/U) (1 - 1/U)^(U-1).
    inline double sa_throughput(double num_users)
    {
        return std::pow(1.0 - 1.0 / num_users, num_users - 1.0);
    }

    struct AnalyticInput
    {
        double frame_slots = 0.0; // m
        double num_users = 0.0;   // U
        double target_load = 0.0; // G*
        double success_prob = 1.0; // p_s

        /// Frames between a delivery and the next admission, U / (m G*).
        double round_robin_frames() const { return num_users / (frame_slots * target_load); }
        double target_throughput() const { return target_load * success_prob; }
    };

    inline void validate_input(const AnalyticInput &in)
    {
        if (!(in.frame_slots > 0.0) || !(in.num_users > 0.0) || !(in.target_load > 0.0))
        {
            throw std::invalid_argument("analytic input: m, U and G* must be > 0");
        }
        if (!(in.success_prob > 0.0) || in.success_prob > 1.0)
        {
            throw std::invalid_argument("analytic input: p_s must lie in (0, 1]");
        }
        if (in.round_robin_frames() < 1.0 - 1e-12)
        {
            throw std::invalid_argument("analytic input: U / (m G*) must be >= 1");
        }
    }

    struct Moments
    {
        double mean = 0.0;
        double second = 0.0;
    };

    /// Moments of Y/m = A + B with B geometric on {0, 1, ...} and success
    /// probability p_s: E[B] = q/p, E[B^2] = q(2-p)/p^2.
    inline Moments inter_update_moments(double round_robin_frames, double success_prob)
    {
        if (!(success_prob > 0.0) || success_prob > 1.0)
        {
            throw std::invalid_argument("inter_update_moments: p_s must lie in (0, 1]");
        }
        if (round_robin_frames < 0.0)
        {
            throw std::invalid_argument("inter_update_moments: A must be >= 0");
        }
        const double a = round_robin_frames;
        const double p = success_prob;
        const double q = 1.0 - p;
        const double eb = q / p;
        const double eb2 = q * (2.0 - p) / (p * p);
        return {a + eb, a * a + 2.0 * a * eb + eb2};
    }

    /// Approximate AT-IRSA network AoI, closed form:
    /// m/2 + (m G* + p_s U) / (2 S*) + (m^2/2) (G* - S*) / (m (1-p_s) S* + p_s^2 U).
    inline double at_irsa_aoi_approx(const AnalyticInput &in)
    {
        validate_input(in);
        const double m = in.frame_slots;
        const double u = in.num_users;
        const double g = in.target_load;
        const double p = in.success_prob;
        const double s = g * p;
        return m / 2.0 + (m * g + p * u) / (2.0 * s) + (m * m / 2.0) * (g - s) / (m * (1.0 - p) * s + p * p * u);
    }

    /// Same approximation through the renewal form m + E[Y^2] / (2 E[Y]).
    inline double at_irsa_aoi_moments(const AnalyticInput &in)
    {
        validate_input(in);
        const Moments y = inter_update_moments(in.round_robin_frames(), in.success_prob);
        return in.frame_slots + in.frame_slots * y.second / (2.0 * y.mean);
    }

    struct SuccessEstimate
    {
        double success_prob = 0.0;
        double std_error = 0.0;
        std::uint64_t transmitted = 0;
        std::uint64_t decoded = 0;
    };

    enum class LoadModel
    {
        Fixed,    // exactly round(m G*) transmitters per frame
        Binomial, // i.i.d. activation: Binomial(U, m G* / U) transmitters per frame
    };

    struct EstimateOptions
    {
        LoadModel load_model = LoadModel::Fixed;
        std::uint32_t population = 0; // U, required by LoadModel::Binomial
        unsigned threads = 0;         // 0: hardware concurrency
    };

    namespace detail
    {
        inline constexpr std::uint64_t kEstimateChunks = 64;

        struct ChunkTally
        {
            std::uint64_t trials = 0;
            double sum_t = 0.0;
            double sum_d = 0.0;
            double sum_tt = 0.0;
            double sum_dd = 0.0;
            double sum_td = 0.0;
        };

        inline ChunkTally estimate_chunk(std::uint32_t frame_slots, const DegreeDistribution &dist, double load, const EstimateOptions &options,
                                         std::uint64_t trials, Stream &stream)
        {
            const auto fixed = static_cast<std::uint64_t>(std::llround(frame_slots * load));
            const double activation = options.population ? std::min(1.0, frame_slots * load / options.population) : 0.0;
            ChunkTally t;
            FrameOccupancy frame;
            frame.frame_slots = frame_slots;
            for (std::uint64_t i = 0; i < trials; ++i)
            {
                const std::uint64_t users = options.load_model == LoadModel::Fixed ? fixed : stream.binomial(options.population, activation);
                frame.transmissions.clear();
                for (std::uint64_t u = 0; u < users; ++u)
                {
                    const unsigned degree = sample_degree(dist, stream);
                    frame.transmissions.push_back({static_cast<UserId>(u), place_replicas(degree, frame_slots, stream)});
                }
                const double d = static_cast<double>(decode_frame(frame).decoded_users.size());
                const double tx = static_cast<double>(users);
                ++t.trials;
                t.sum_t += tx;
                t.sum_d += d;
                t.sum_tt += tx * tx;
                t.sum_dd += d * d;
                t.sum_td += tx * d;
            }
            return t;
        }
    }

    /// Monte Carlo estimate of p_s = decoded / transmitted at load G*. Trials
    /// are split into a fixed number of chunks with seeds derived from
    /// `seed`, so the result does not depend on the number of threads.
    inline SuccessEstimate estimate_ps(std::uint32_t frame_slots, const DegreeDistribution &dist, double load, std::uint64_t trials,
                                       std::uint64_t seed, EstimateOptions options = {})
    {
        if (trials == 0)
        {
            throw std::invalid_argument("estimate_ps: trials must be > 0");
        }
        if (frame_slots == 0 || dist.max_degree() > frame_slots)
        {
            throw std::invalid_argument("estimate_ps: max degree exceeds frame_slots");
        }
        if (options.load_model == LoadModel::Fixed && std::llround(frame_slots * load) < 1)
        {
            throw std::invalid_argument("estimate_ps: round(m G*) must be >= 1");
        }
        if (!(load > 0.0))
        {
            throw std::invalid_argument("estimate_ps: load must be > 0");
        }
        if (options.load_model == LoadModel::Binomial && frame_slots * load > options.population)
        {
            throw std::invalid_argument("estimate_ps: binomial load model needs population >= m G*");
        }

        const std::uint64_t chunks = std::min<std::uint64_t>(detail::kEstimateChunks, trials);
        std::vector<detail::ChunkTally> tallies(chunks);
        auto work = [&](std::uint64_t c) {
            const std::uint64_t n = trials / chunks + (c < trials % chunks ? 1 : 0);
            Stream stream(derive_seed(seed, {static_cast<std::uint64_t>(StreamPurpose::SuccessEstimate), c}));
            tallies[c] = detail::estimate_chunk(frame_slots, dist, load, options, n, stream);
        };
        unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
        if (threads <= 1)
        {
            for (std::uint64_t c = 0; c < chunks; ++c)
            {
                work(c);
            }
        }
        else
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w)
            {
                pool.emplace_back([&, w] {
                    for (std::uint64_t c = w; c < chunks; c += threads)
                    {
                        work(c);
                    }
                });
            }
        }

        detail::ChunkTally all;
        for (const auto &t : tallies)
        {
            all.trials += t.trials;
            all.sum_t += t.sum_t;
            all.sum_d += t.sum_d;
            all.sum_tt += t.sum_tt;
            all.sum_dd += t.sum_dd;
            all.sum_td += t.sum_td;
        }
        SuccessEstimate est;
        est.transmitted = static_cast<std::uint64_t>(all.sum_t);
        est.decoded = static_cast<std::uint64_t>(all.sum_d);
        if (all.sum_t <= 0.0)
        {
            return est;
        }
        const double r = all.sum_d / all.sum_t;
        est.success_prob = r;
        const double n = static_cast<double>(all.trials);
        if (n > 1.0)
        {
            // Ratio-estimator standard error: residuals d_i - r t_i.
            const double ss = all.sum_dd - 2.0 * r * all.sum_td + r * r * all.sum_tt;
            const double mean_t = all.sum_t / n;
            est.std_error = std::sqrt(std::max(0.0, ss) / (n * (n - 1.0))) / mean_t;
        }
        return est;
    }

    struct LoadPoint
    {
        double load = 0.0;
        double success_prob = 0.0;
        double throughput = 0.0;
    };

    struct PeakLoad
    {
        double load = 0.0;
        double throughput = 0.0;
        double success_prob = 0.0;
        std::vector<LoadPoint> curve;
    };

    /// Grid load maximizing S = G p_s(G). Ties keep the lowest load.
    inline PeakLoad find_peak_load(std::uint32_t frame_slots, const DegreeDistribution &dist, const std::vector<double> &grid,
                                   std::uint64_t trials, std::uint64_t seed, EstimateOptions options = {})
    {
        if (grid.empty())
        {
            throw std::invalid_argument("find_peak_load: empty grid");
        }
        PeakLoad peak;
        peak.throughput = -1.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            const double g = grid[i];
            const auto est = estimate_ps(frame_slots, dist, g, trials, derive_seed(seed, {static_cast<std::uint64_t>(StreamPurpose::PeakSearch), i}), options);
            const LoadPoint pt{g, est.success_prob, g * est.success_prob};
            peak.curve.push_back(pt);
            if (pt.throughput > peak.throughput)
            {
                peak.load = g;
                peak.throughput = pt.throughput;
                peak.success_prob = pt.success_prob;
            }
        }
        return peak;
    }

    /// Inclusive arithmetic grid from `first` to `last`.
    inline std::vector<double> load_grid(double first, double last, double step)
    {
        if (!(step > 0.0) || last < first)
        {
            throw std::invalid_argument("load_grid: need step > 0 and last >= first");
        }
        std::vector<double> g;
        const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i)
        {
            g.push_back(first + static_cast<double>(i) * step);
        }
        return g;
    }
}
