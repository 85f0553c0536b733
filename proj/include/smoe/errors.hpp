#pragma once

#include <stdexcept>
#include <string>

namespace smoe {

// Malformed or unreadable data: bad magic bytes, truncated files,
// dimension mismatches, out-of-range config values.
struct format_error : std::runtime_error {
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric faults detected at runtime: NaN activations, non-finite loss.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace smoe
