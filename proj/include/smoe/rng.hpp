#pragma once

#include <cmath>
#include <cstdint>

namespace smoe::rng {

// splitmix64 finalizer. Bijective avalanche mix; feeding it distinct
// counters yields independent-looking streams, which keeps every draw a
// pure function of (seed, index) regardless of threading.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Distinct stream per (seed, stream_id); golden-ratio stride keeps
// counters well separated before the finalizer.
inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream_id) {
    return mix(seed + stream_id * 0x9E3779B97F4A7C15ULL);
}

// Uniform double in [0, 1) from 53 high bits.
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log argument.
inline double to_unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t idx) {
    return to_unit(mix(seed + idx * 0x9E3779B97F4A7C15ULL));
}

struct NormalPair {
    double a;
    double b;
};

// Two independent standard normals per counter via Box-Muller.
inline NormalPair normal_pair(std::uint64_t seed, std::uint64_t idx) {
    const std::uint64_t u = mix(seed + (2 * idx) * 0x9E3779B97F4A7C15ULL);
    const std::uint64_t v = mix(seed + (2 * idx + 1) * 0x9E3779B97F4A7C15ULL);
    const double r = std::sqrt(-2.0 * std::log(to_unit_open(u)));
    const double theta = 6.283185307179586476925286766559 * to_unit(v);
    return {r * std::cos(theta), r * std::sin(theta)};
}

// Small sequential generator for shuffles and sampling. Counter-based
// underneath, so state is just (key, position) and reruns are exact.
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_(key(seed, stream_id)) {}

    std::uint64_t next_u64() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

    double next_unit() { return to_unit(next_u64()); }
    double next_unit_open() { return to_unit_open(next_u64()); }

    // Uniform integer in [0, n). n must be >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n)) % n;
    }

    double next_normal() {
        const std::uint64_t u = next_u64();
        const std::uint64_t v = next_u64();
        const double r = std::sqrt(-2.0 * std::log(to_unit_open(u)));
        return r * std::cos(6.283185307179586476925286766559 * to_unit(v));
    }

    template <typename T>
    void shuffle(T& seq) {
        if (seq.size() < 2) return;
        for (std::size_t i = seq.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i + 1));
            std::swap(seq[i], seq[j]);
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace smoe::rng
