#pragma once

#include <cstdint>

namespace pucci3d {

/// Counter-based generator: draw k of stream s depends only on (seed, s, k),
/// so any chunking of the index space reproduces the serial stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    CounterRng split(std::uint64_t stream) const {
        CounterRng r(0);
        r.key_ = mix(key_ ^ mix(stream + 0xd1b54a32d192ed03ULL));
        return r;
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(key_ + mix(counter * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

}  // namespace pucci3d
