#pragma once

// Seedable, splittable random streams for Monte Carlo work.  Every
// replication derives its own stream from (seed, stream index) through the
// splitmix64 mixer, so results do not depend on thread scheduling.

#include <cstdint>
#include <random>

namespace sensweep {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for work item `index` under a master seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class split_rng {
public:
    split_rng(std::uint64_t seed, std::uint64_t stream)
        : state_(derive_stream(seed, stream)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

    // a std engine seeded from this stream, for std distributions
    std::mt19937_64 engine() { return std::mt19937_64(next_u64()); }

private:
    std::uint64_t state_;
};

}  // namespace sensweep
