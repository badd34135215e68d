#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace gicr {

/// xoshiro256++ bit generator; satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Independent, reproducible random stream for one Monte Carlo path.
///
/// The draw sequence depends only on (seed, stream_id). A mirrored stream
/// returns -z for every normal and 1-u for every uniform of its twin, which
/// gives antithetic pairs without extra bookkeeping.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id, bool mirrored = false);

    double normal();
    double uniform();      // in (0, 1)
    double exponential();  // unit rate

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    bool mirrored() const { return mirrored_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    bool mirrored_;
    Xoshiro256pp engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer, used for seeding and config hashing.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gicr
