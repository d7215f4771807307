#pragma once

#include <cstdint>
#include <vector>

namespace emopipe::detail {

/// Counter-based deterministic random stream (SplitMix64 over a keyed
/// counter). Unlike std engines + distributions, every draw is fully
/// specified, so shuffles and parameter init are bit-identical across
/// platforms and runs.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : key_(key) {}

    /// Stream keyed by (seed, stream_id), e.g. (config.seed, epoch).
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(stream_id + 0x632be59bd9b4e019ULL)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Unbiased draw in [0, bound) via rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 bits of randomness.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-range, range).
    double next_symmetric(double range) { return (2.0 * next_double() - 1.0) * range; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// In-place Fisher-Yates shuffle driven by a RandomStream.
template <typename T>
void shuffle(std::vector<T>& items, RandomStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace emopipe::detail
