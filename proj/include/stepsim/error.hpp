#ifndef STEPSIM_ERROR_HPP
#define STEPSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace stepsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel: schedule() called with a fire time behind the clock.
struct SchedulingInPast : Error {
    using Error::Error;
};

// Topology construction rejected (zero steps/hosts, nonpositive rate, ...).
struct InvalidSpec : Error {
    using Error::Error;
};

// ToS outside [0,7].
struct InvalidTos : Error {
    using Error::Error;
};

// A packet reached a host it was not addressed to; routing bug, not recoverable.
struct MisroutedPacket : Error {
    using Error::Error;
};

// delivered_at < created_at; clock bug, not recoverable.
struct NegativeDelay : Error {
    using Error::Error;
};

// Scenario text could not be parsed; message carries the line number.
struct ParseError : Error {
    using Error::Error;
};

// Scenario parsed but violates an invariant; message names it.
struct ValidationError : Error {
    using Error::Error;
};

struct IoFailure : Error {
    using Error::Error;
};

} // namespace stepsim

#endif
