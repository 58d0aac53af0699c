#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace sharpefolio::detail {

/// mt19937_64 with hand-written draws, so a seed gives the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
    /// Uniform on [0, 1).
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }
    double normal() {
        double u1 = 1.0 - unit();
        double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    template <class T, std::size_t N>
    const T& pick(const T (&xs)[N]) {
        return xs[index(N)];
    }

private:
    std::mt19937_64 gen_;
};

} // namespace sharpefolio::detail
