#ifndef FAIRPIPE_RNG_HPP
#define FAIRPIPE_RNG_HPP

#include <cstdint>
#include <string_view>

namespace fairpipe {

// All randomness in the library flows from one user seed through SplitMix64
// streams. Derived seeds depend only on the logical index of the work item
// (trial number, record id, stage), never on evaluation order or thread
// count, so parallel runs reproduce serial output exactly.

constexpr std::uint64_t kSeedGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + kSeedGamma * (stream + 1));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

/// Stable 64-bit string hash (FNV-1a); std::hash is not portable across
/// implementations and must not leak into seeded results.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kSeedGamma;
        return mix64(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// Uniform in [0, n) without modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % n;
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace fairpipe

#endif  // FAIRPIPE_RNG_HPP
