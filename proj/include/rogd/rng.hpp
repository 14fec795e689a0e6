#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace rogd {

// Purpose tags used to split one global seed into independent streams.
// Draws are keyed (seed, purpose, a, b, c), so changing the horizon T never
// perturbs draws made for earlier rounds or other purposes.
enum class StreamPurpose : std::uint64_t {
    graph = 1,
    placement = 2,
    adversary = 3,
    noise = 4,
    init_states = 5,
    sensor_gains = 6,
    true_value = 7,
    reduced_sample = 8,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t chain(std::uint64_t h, std::uint64_t v) {
    return mix64(h + 0x9E3779B97F4A7C15ull + v);
}

}  // namespace detail

// Per-entity sub-seed (e.g. one independent stream per adversary).
inline std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t salt) {
    return detail::chain(detail::chain(detail::mix64(seed), static_cast<std::uint64_t>(purpose)),
                         salt);
}

// Stateless counter-based random stream (splitmix-style finalizer).
class RngStream {
  public:
    RngStream() = default;
    RngStream(std::uint64_t seed, StreamPurpose purpose)
        : key_(detail::chain(detail::mix64(seed), static_cast<std::uint64_t>(purpose))) {}

    std::uint64_t bits(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        return detail::mix64(detail::chain(detail::chain(detail::chain(key_, a), b), c));
    }

    // Uniform in [0, 1).
    double uniform01(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        return static_cast<double>(bits(a, b, c) >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi, std::uint64_t a, std::uint64_t b = 0,
                   std::uint64_t c = 0) const {
        return lo + (hi - lo) * uniform01(a, b, c);
    }

    // Standard normal via Box-Muller; sub-draw indices 2c and 2c+1.
    double gaussian(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        const double u1 = 1.0 - uniform01(a, b, 2 * c);      // (0, 1]
        const double u2 = uniform01(a, b, 2 * c + 1);        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n) via 128-bit multiply (bias < n / 2^64).
    std::uint64_t bounded(std::uint64_t n, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0) const {
        const unsigned __int128 m =
            static_cast<unsigned __int128>(bits(a, b, c)) * static_cast<unsigned __int128>(n);
        return static_cast<std::uint64_t>(m >> 64);
    }

  private:
    std::uint64_t key_ = 0;
};

// Sequential draws on top of a counter stream, for shuffles and weighted picks.
class SeqRng {
  public:
    SeqRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t salt = 0)
        : stream_(seed, purpose), salt_(salt) {}

    std::uint64_t next_bits() { return stream_.bits(salt_, counter_++); }
    double next_uniform01() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }
    std::uint64_t next_bounded(std::uint64_t n) {
        const unsigned __int128 m =
            static_cast<unsigned __int128>(next_bits()) * static_cast<unsigned __int128>(n);
        return static_cast<std::uint64_t>(m >> 64);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_bounded(i)]);
        }
    }

  private:
    RngStream stream_;
    std::uint64_t salt_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace rogd
