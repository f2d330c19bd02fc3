#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include <Eigen/Core>

namespace spinlab {

/// Counter-based splittable random stream (SplitMix64 core).
///
/// Streams are cheap value types. `child(tag)` derives an independent
/// stream from the current state and a caller-chosen tag, which is how
/// recursive samplers and parallel replicas get reproducible, collision-free
/// randomness from one root seed.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed = 0) : state_(mix(seed + kGamma)) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    int below(int n) {
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one value per call; no carry).
    double gaussian() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Index sampled proportionally to `w` (entries >= 0, not all zero).
    /// Returns -1 when all weights vanish; callers decide how to fail.
    int categorical(std::span<const double> w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) return -1;
        double u = uniform() * total;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            u -= w[i];
            if (u < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(w.size()) - 1;
    }

    int categorical(const Eigen::VectorXd& w) {
        return categorical(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
    }

    /// Independent stream derived from (current state, tag).
    RngStream child(std::uint64_t tag) const {
        RngStream c(0);
        c.state_ = mix(state_ ^ mix(tag + kGamma));
        return c;
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace spinlab
