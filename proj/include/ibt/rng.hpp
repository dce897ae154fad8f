#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace ibt {

/// Purposes that own an independent random stream.
enum class Stream : std::uint64_t {
    folds = 1,
    outlier_training = 2,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/**
 * Portable random source.
 *
 * The engine is `std::mt19937_64`, whose output sequence is fixed by the
 * standard. Stream keys are derived as
 * `splitmix64(splitmix64(splitmix64(seed) ^ purpose) ^ index)`, so every
 * (seed, purpose, index) triple gets its own generator and fold plans never
 * depend on how many draws other purposes made. Bounded integers use
 * rejection sampling instead of `std::uniform_int_distribution`, whose
 * algorithm is implementation-defined.
 */
class Rng {
public:
    Rng(std::uint64_t seed, Stream purpose, std::uint64_t index)
        : engine_(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(purpose)) ^ index)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound), bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ibt
