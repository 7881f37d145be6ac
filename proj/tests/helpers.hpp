#pragma once

#include <random>

#include "simpcert/interval.hpp"

namespace testutil {

// Desk-scale random intervals: centers in [-1, 1], widths in [1, 3]. The
// float error identities hold with an ~18x empirical margin here; far-from-
// origin intervals lose precision to coefficient quantization and belong to
// the exact rational path instead.
inline simpcert::Interval random_interval(std::mt19937& gen) {
    std::uniform_real_distribution<double> center(-1.0, 1.0);
    std::uniform_real_distribution<double> width(1.0, 3.0);
    const double c = center(gen);
    const double w = width(gen);
    return simpcert::Interval(c - w / 2.0, c + w / 2.0);
}

inline double random_in(std::mt19937& gen, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

} // namespace testutil
