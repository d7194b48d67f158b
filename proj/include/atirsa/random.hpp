#pragma once

// Deterministic random streams.
//
// Every stochastic operation takes an explicit Stream. Streams are seeded
// through SplitMix64 so that a master seed can be split into independent
// per-(replication, purpose) streams without any dependence on the order
// in which replications are scheduled.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace atirsa
{
    inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Derives a child seed from a parent seed and a list of integer keys.
    /// derive_seed(s, {a, b}) == derive_seed(derive_seed(s, {a}), {b}).
    inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept
    {
        std::uint64_t h = seed;
        for (auto k : keys)
        {
            h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
        }
        return h;
    }

    /// Stream purposes used when splitting a replication seed.
    enum class StreamPurpose : std::uint64_t
    {
        Simulation = 1,
        SuccessEstimate = 2,
        PeakSearch = 3,
    };

    class Stream
    {
    public:
        explicit Stream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

        Stream(const Stream &) = delete;
        Stream &operator=(const Stream &) = delete;
        Stream(Stream &&) noexcept = default;
        Stream &operator=(Stream &&) noexcept = default;

        std::uint64_t next_u64() { return engine_(); }

        /// Uniform on [0, 1) with 53 random bits.
        double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        /// Uniform integer on [0, bound). bound must be > 0.
        std::uint64_t below(std::uint64_t bound)
        {
            // Lemire's nearly-divisionless rejection.
            __uint128_t product = static_cast<__uint128_t>(engine_()) * bound;
            auto low = static_cast<std::uint64_t>(product);
            if (low < bound)
            {
                const std::uint64_t threshold = (0 - bound) % bound;
                while (low < threshold)
                {
                    product = static_cast<__uint128_t>(engine_()) * bound;
                    low = static_cast<std::uint64_t>(product);
                }
            }
            return static_cast<std::uint64_t>(product >> 64);
        }

        bool bernoulli(double p) { return uniform01() < p; }

        /// Binomial(trials, p) by sequential inversion of the pmf. Large means
        /// are split into independent halves so the starting pmf never
        /// underflows; the result is exact in distribution.
        std::uint64_t binomial(std::uint64_t trials, double p)
        {
            if (trials == 0 || p <= 0.0)
            {
                return 0;
            }
            if (p >= 1.0)
            {
                return trials;
            }
            if (p > 0.5)
            {
                return trials - binomial(trials, 1.0 - p);
            }
            if (static_cast<double>(trials) * p > 256.0)
            {
                const std::uint64_t half = trials / 2;
                return binomial(half, p) + binomial(trials - half, p);
            }
            const double ratio = p / (1.0 - p);
            double pmf = std::exp(static_cast<double>(trials) * std::log1p(-p));
            double u = uniform01();
            std::uint64_t k = 0;
            while (u >= pmf && k < trials)
            {
                u -= pmf;
                pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
                ++k;
            }
            return k;
        }

    private:
        std::mt19937_64 engine_;
    };
}
