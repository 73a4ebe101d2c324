#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dimimo {

// splitmix64: cheap, well-mixed 64-bit hash used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic child-seed derivation: child k of a master seed gets a
// stream independent of every other child, stable across platforms.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t k) {
    return splitmix64(splitmix64(master) ^ splitmix64(k + 0x5bf0'3635'ded5'4c35ULL));
}

// Seeded generator with fully specified sampling (uniform and Box-Muller
// normal are implemented here rather than through std distributions, whose
// output is implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)), base_seed_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    bool bit() { return (engine_() >> 63) != 0; }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    Rng child(std::uint64_t k) const { return Rng(child_seed(base_seed_, k)); }

  private:
    std::mt19937_64 engine_;
    std::uint64_t base_seed_{0};
    double spare_{0.0};
    bool has_spare_{false};
};

}  // namespace dimimo
