#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace sharpefolio::detail {

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// True when every element equals the first; such a sample has exactly zero spread.
inline bool all_equal(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

/// Two-pass sample standard deviation (n - 1 denominator).
inline double sample_std(std::span<const double> xs, double mu) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double population_std(std::span<const double> xs, double mu) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

} // namespace sharpefolio::detail
