#pragma once

// Shortest round-trip float formatting shared by the CSV writers.
// std::to_chars emits the shortest decimal that parses back to the same
// double, which is what makes save/load cycles bit-exact.

#include <array>
#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "qdob/errors.hpp"

namespace qdob::detail {

inline void append_shortest(std::string& out, double v) {
    std::array<char, 64> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

inline double parse_double(std::string_view field, const std::string& context) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw io_error("bad numeric field '" + std::string(field) + "' in " + context);
    return v;
}

}  // namespace qdob::detail
