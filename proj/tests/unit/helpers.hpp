#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "apstab/apstab.hpp"

namespace apstab::testing {

// n x 1 instance from scalars.
inline Instance line(std::initializer_list<double> xs) {
    Matrix m(xs.size(), 1);
    std::size_t i = 0;
    for (double x : xs) m(i++, 0) = x;
    return Instance::make(std::move(m));
}

inline Instance points(std::initializer_list<std::initializer_list<double>> rows) {
    return Instance::make(Matrix(rows));
}

// Gaussian cloud, n points in d dimensions.
inline Instance gaussian(std::size_t n, std::size_t d, double sigma, std::uint64_t seed) {
    CounterRng rng(seed);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) m(i, c) = sigma * rng.normal();
    return Instance::make(std::move(m));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace apstab::testing
