#pragma once

#include "geostream/common.hpp"

#include <cstdint>
#include <initializer_list>

namespace geostream::rng {

// splitmix64 step; also used to hash substream paths.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic, order-stable stream of pseudo-random scalars. All randomized
// algorithms in this library draw from substreams keyed by (seed, path...), so
// replaying a stream with the same seed reproduces every decision bit-for-bit
// regardless of how many draws other components consumed.
class Stream {
public:
    explicit Stream(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform01();                 // [0, 1)
    double exponential();               // Exp(1) via inverse CDF
    double gaussian();                  // N(0, 1), Box-Muller
    Index uniform_index(Index n);       // {0, ..., n-1}

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Stream substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

}  // namespace geostream::rng
