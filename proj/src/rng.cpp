#include "gicr/rng.hpp"

#include <bit>
#include <cmath>

namespace gicr {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& word : s_) {
        z = splitmix64(z);
        word = z;
    }
}

Xoshiro256pp::result_type Xoshiro256pp::operator()() {
    const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, bool mirrored)
    : seed_(seed),
      stream_id_(stream_id),
      mirrored_(mirrored),
      engine_(splitmix64(seed) ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL)) {}

double RngStream::normal() {
    const double z = normal_(engine_);
    return mirrored_ ? -z : z;
}

double RngStream::uniform() {
    // 53 random bits mapped to the open interval (0, 1).
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return mirrored_ ? 1.0 - u : u;
}

double RngStream::exponential() { return -std::log(uniform()); }

}  // namespace gicr
