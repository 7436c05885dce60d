#pragma once

#include <cstdint>
#include <vector>

namespace qn {

/**
 * Deterministic 64-bit pseudo-random generator (splitmix64 core).
 *
 * The state transition uses only fixed-width integer arithmetic, so the
 * u64 stream is identical on every platform for a given seed.  Floating
 * point derivations (uniform, gaussian) consume the stream in a documented
 * order: uniform() takes one draw, gaussian() takes exactly two.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Next raw 64-bit value.
    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /**
     * Gaussian draw via Box-Muller, consuming two uniforms per call (no
     * cached spare, which keeps the stream position easy to reason about).
     * stddev == 0 returns mean exactly without consuming the stream.
     */
    double gaussian(double mean, double stddev);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derive an unrelated child seed (for restart attempts, per-run streams).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt);

private:
    std::uint64_t state_;
};

} // namespace qn
