#ifndef RPQUANT_RNG_HPP
#define RPQUANT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace rpquant {

/// Splittable deterministic random stream (xoshiro256++ over a splitmix64
/// key schedule).
///
/// Streams are identified by a 64-bit key derived from (seed, path), where
/// the path is a list of child indices. The splitting rule is
///   child(i).key = mix(key + (i + 1) * 0x9e3779b97f4a7c15)
/// so sibling subtrees and parallel workers draw from independent streams
/// that depend only on (seed, path), never on scheduling order.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kGamma)) { reset_state(); }

    SplitRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) : SplitRng(seed) {
        for (auto idx : path) *this = child(idx);
    }

    /// Derive the stream of child `index`; the parent stream is unaffected.
    [[nodiscard]] SplitRng child(std::uint64_t index) const {
        return SplitRng(FromKey{}, mix(key_ + (index + 1) * kGamma));
    }

    std::uint64_t next_u64() {
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

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1].
    double next_double_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(next_double_open()));
        const double theta = 2.0 * std::numbers::pi * next_double();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    std::uint64_t key() const { return key_; }

private:
    struct FromKey {};
    SplitRng(FromKey, std::uint64_t key) : key_(key) { reset_state(); }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    void reset_state() {
        std::uint64_t z = key_;
        for (auto& s : s_) {
            z += kGamma;
            s = mix(z);
        }
        have_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t key_;
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rpquant

#endif
