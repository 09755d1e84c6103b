#pragma once

#include <cstdint>
#include <initializer_list>

namespace mors {

// Splittable PRNG (splitmix64). Every randomized stage of the pipeline
// draws from one of these, never from std::random, so that outputs are
// byte-identical across platforms, standard libraries, and thread counts.
//
// Substreams are derived by hashing (seed, tag...) tuples; see derive().
// Two substreams with different tag tuples are statistically independent
// for our purposes.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Rejection-sampled so every value is equally likely.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

// Derives a substream seed from a root seed and a tag tuple. Feeding the
// same tuple always yields the same stream; any change to any tag yields
// an unrelated one. Used for per-block, per-iteration, and per-grid-point
// streams so parallel schedules cannot affect results.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = seed;
    for (std::uint64_t t : tags) {
        Rng mix(s ^ (t + 0x9E3779B97F4A7C15ULL));
        s = mix.next();
    }
    return s;
}

inline Rng derive_rng(std::uint64_t seed,
                      std::initializer_list<std::uint64_t> tags) {
    return Rng(derive_seed(seed, tags));
}

} // namespace mors
