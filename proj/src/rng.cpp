#include "qn/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qn {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    // Rejection to avoid modulo bias; the loop terminates almost surely.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double Rng::gaussian(double mean, double stddev) {
    if (stddev == 0.0) return mean;
    double a = uniform();
    double b = uniform();
    double u1 = 1.0 - a; // (0, 1], keeps log() finite
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * b);
    return mean + stddev * z;
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t salt) {
    // One splitmix64 output step over a salted state.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace qn
