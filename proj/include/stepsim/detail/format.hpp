#ifndef STEPSIM_DETAIL_FORMAT_HPP
#define STEPSIM_DETAIL_FORMAT_HPP

#include <charconv>
#include <string>

namespace stepsim::detail {

// Shortest round-trip decimal form; keeps emitted files byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace stepsim::detail

#endif
