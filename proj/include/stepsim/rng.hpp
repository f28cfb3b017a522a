#ifndef STEPSIM_RNG_HPP
#define STEPSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace stepsim {

/// Seeded random stream, keyed by (run seed, label). Two streams built from
/// the same key replay the same sequence; distinct labels decorrelate.
/// Draws go through hand-rolled transforms (not std::*_distribution) so the
/// byte sequence is pinned by the mt19937_64 standard, not the libstdc++
/// implementation.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::string_view label);

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given mean (mean = 1/rate).
    double exponential(double mean) { return -std::log1p(-uniform01()) * mean; }

    const std::string& label() const { return label_; }

private:
    std::mt19937_64 gen_;
    std::string label_;
};

} // namespace stepsim

#endif
