#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace evasim {

/// Seedable deterministic random source. The raw stream is mt19937_64 (fully
/// specified by the standard), and all derived distributions are computed here
/// from raw 64-bit draws so that value sequences do not depend on the standard
/// library implementation.
///
/// Each unit of parallel work gets its own generator via derive(), which mixes
/// the seed with a stream index and is independent of how much the parent has
/// already been consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    static constexpr std::string_view algorithm_id() { return "mt19937_64"; }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi). Requires lo <= hi.
    double uniform_real(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    /// Uniform integer in [lo, hi], inclusive, unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) {  // full 64-bit range
            return lo + static_cast<std::int64_t>(next_u64());
        }
        const std::uint64_t reject_below = (-span) % span;
        std::uint64_t x = next_u64();
        while (x < reject_below) x = next_u64();
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Standard normal via Box-Muller (deterministic draw order).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Child generator for stream `index`, a pure function of (seed, index).
    Rng derive(std::uint64_t index) const {
        return Rng(mix(seed_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
    }

    /// splitmix64 finalizer; also used to hash seed material elsewhere.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace evasim
