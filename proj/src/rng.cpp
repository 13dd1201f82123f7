#include "geostream/rng.hpp"

#include <cmath>

namespace geostream::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Stream::Stream(std::uint64_t seed) : state_(seed) {
    // burn a few states so nearby seeds decorrelate
    splitmix64(state_);
    splitmix64(state_);
}

std::uint64_t Stream::next_u64() { return splitmix64(state_); }

double Stream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::exponential() {
    return -std::log1p(-uniform01());
}

double Stream::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Index Stream::uniform_index(Index n) {
    if (n <= 0) throw algo_error("EmptyRange", "uniform_index needs n > 0");
    // rejection sampling to avoid modulo bias
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<Index>(x % un);
}

Stream substream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master ^ 0x5851f42d4c957f2dULL;
    for (std::uint64_t p : path) {
        s ^= splitmix64(s) + p;
        splitmix64(s);
    }
    return Stream(s);
}

}  // namespace geostream::rng
