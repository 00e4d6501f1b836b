#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace common {

// All randomness in the toolkit flows through this wrapper. The engine is
// std::mt19937_64 (sequence pinned by the standard) and the distributions are
// written out by hand, so a given seed produces the same draws on every
// platform and standard library.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer on [0, n). Rejection sampling, no modulo bias.
    uint64_t next_below(uint64_t n) {
        if (n == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller (two uniforms per draw, no cached pair).
    double next_gaussian() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double gaussian(double mean, double sd) { return mean + sd * next_gaussian(); }

    // Fisher-Yates over [0, n) index vectors.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable sub-seed derivation: hash a tag string into the master seed so that
// independent consumers (per study, per run, per cell) never share a stream
// and adding one consumer does not perturb the others.
inline uint64_t derive_seed(uint64_t seed, std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

inline uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t index) {
    return splitmix64(derive_seed(seed, tag) ^ splitmix64(index + 0x9e3779b9ULL));
}

}  // namespace common
