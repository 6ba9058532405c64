#pragma once

// Counter-based random source. Every draw is a pure function of
// (seed, stream, counter), so replays match across platforms and thread
// schedules. Distributions are implemented here rather than with <random>
// because the standard distributions are implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "core.hpp"

namespace apstab {

inline constexpr std::string_view kRngAlgorithmId = "splitmix64-ctr";

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + 0x632BE59BD9B4E019ULL))) {}

    // Independent substream; does not disturb this generator's counter.
    CounterRng fork(std::uint64_t stream) const noexcept {
        CounterRng out(0);
        out.key_ = splitmix64_mix(key_ ^ splitmix64_mix(stream + 0xD1B54A32D192ED03ULL));
        return out;
    }

    std::uint64_t next_u64() noexcept {
        return splitmix64_mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n) by rejection; n must be > 0.
    std::uint64_t index(std::uint64_t n) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Uniformly distributed unit vector.
    Vector unit_vector(std::size_t dim) {
        Vector v(dim);
        double n2 = 0.0;
        while (n2 < 1e-24) {
            n2 = 0.0;
            for (auto& x : v) {
                x = normal();
                n2 += x * x;
            }
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& x : v) x *= inv;
        return v;
    }

    // Uniform point in the ball of the given radius.
    Vector in_ball(std::size_t dim, double radius) {
        Vector v = unit_vector(dim);
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
        for (auto& x : v) x *= r;
        return v;
    }

    template <class It>
    void shuffle(It first, It last) noexcept {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = index(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace apstab
