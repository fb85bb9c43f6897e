#pragma once

// Portable random streams. Distribution code in the standard library is
// implementation-defined, so everything here is built from raw 64-bit words
// of std::mt19937_64 to keep runs bit-reproducible across toolchains.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace anwser {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Folds a list of keys (master seed, cell, sample, purpose...) into one seed.
inline constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

/// Stream purposes; part of the seed derivation contract.
enum class Stream : std::uint64_t { network = 1, portfolio = 2, shock = 3 };

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, n) by rejection, n > 0.
    std::size_t index(std::size_t n) {
        const auto bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    bool coin() { return (next() >> 63) != 0; }

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace anwser
