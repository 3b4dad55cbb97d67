#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pyrtex {

/// splitmix64 mixing step; used for seed derivation and coordinate hashing.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic RNG. Distributions are hand-rolled on top of mt19937_64 so
/// that streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(
                        (static_cast<unsigned __int128>(next_u64()) * span) >> 64);
    }

    /// Standard normal via Box-Muller (no cached spare, stream stays simple).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

/// Stateless hash of a seeded 2-D lattice coordinate to a uniform in [-1,1].
inline double hash_to_signed_unit(uint64_t seed, int64_t ix, int64_t iy) {
    uint64_t h = splitmix64(seed ^ splitmix64(static_cast<uint64_t>(ix) * 0x9e3779b97f4a7c15ULL ^
                                              splitmix64(static_cast<uint64_t>(iy))));
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace pyrtex
