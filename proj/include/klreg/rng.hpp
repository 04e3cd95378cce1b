#ifndef KLREG_RNG_HPP_
#define KLREG_RNG_HPP_

#include <cstdint>

namespace klreg {

/**
 * splitmix64 generator (Steele, Lea, Flood 2014).
 *
 * Chosen as the instance-generation RNG because the algorithm is tiny,
 * public-domain, and reproducible bit-for-bit across platforms and
 * languages, which the determinism contracts of the generators require.
 * Known-answer: seed 0 produces 0xe220a8397b1dcdaf first.
 */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0,n), rejection sampling to avoid modulo bias
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t lim = ~0ull - (~0ull % n + 1ull) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r <= lim) return r % n;
        }
    }

    // independent child stream
    SplitMix64 fork() { return SplitMix64(next_u64()); }

  private:
    std::uint64_t state_;
};

}  // namespace klreg

#endif  // KLREG_RNG_HPP_
