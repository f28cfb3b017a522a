#ifndef STEPSIM_TIME_HPP
#define STEPSIM_TIME_HPP

#include <cmath>
#include <compare>
#include <cstdint>

namespace stepsim {

/// Simulation time as integer nanoseconds. Integer ticks keep event ordering
/// exact; 1 ns resolves 10 Mbps serialization (0.8 us/byte) with no residue.
struct SimTime {
    std::int64_t ns = 0;

    static constexpr SimTime zero() { return SimTime{0}; }

    static constexpr SimTime from_ns(std::int64_t v) { return SimTime{v}; }

    static SimTime from_seconds(double s) {
        return SimTime{static_cast<std::int64_t>(std::llround(s * 1e9))};
    }

    double seconds() const { return static_cast<double>(ns) * 1e-9; }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ns + b.ns}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ns - b.ns}; }
    SimTime& operator+=(SimTime o) {
        ns += o.ns;
        return *this;
    }
};

} // namespace stepsim

#endif
