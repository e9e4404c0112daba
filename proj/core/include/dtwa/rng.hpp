#pragma once

// Counter-based stream derivation + a small, fast generator.
//
// Every trajectory owns a private stream keyed by
// (master_seed, disorder realization, trajectory index, context salt), so the
// numbers a trajectory sees never depend on scheduling or worker count.
// Streams are derived with the SplitMix64 finalizer (Steele/Lea/Flood 2014,
// constants from Vigna's public-domain reference) and drive xoshiro256++.
//
// We do not use <random> distributions: their output is implementation
// defined, which would break the byte-identical-output contract.

#include <array>
#include <cmath>
#include <cstdint>

namespace dtwa {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer: bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kSplitMixGamma;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1], safe as a log() argument
    double uniform_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    // fair +1/-1 from the top bit
    double sign() { return (next() >> 63) ? 1.0 : -1.0; }

    // standard normal via Box-Muller; caches the second variate
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, bound); bound > 0. Modulo bias is irrelevant at
    // the bounds used here (lattice sizes), reproducibility is what matters.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Context salts keep streams used for different purposes disjoint even when
// indices collide.
enum class StreamKind : std::uint64_t {
    trajectory = 0x7472616A00000000ULL,
    dilution = 0x64696C7500000000ULL,
};

inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t realization,
                                 std::uint64_t index, StreamKind kind) {
    std::uint64_t h = mix64(master_seed + kSplitMixGamma);
    h = mix64(h ^ (realization + 0x243F6A8885A308D3ULL));
    h = mix64(h ^ (index + 0x13198A2E03707344ULL));
    h = mix64(h ^ static_cast<std::uint64_t>(kind));
    return h;
}

inline Xoshiro256pp make_stream(std::uint64_t master_seed, std::uint64_t realization,
                                std::uint64_t index, StreamKind kind) {
    return Xoshiro256pp(stream_seed(master_seed, realization, index, kind));
}

}  // namespace dtwa
