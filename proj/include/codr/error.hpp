#pragma once

#include <stdexcept>
#include <string>

namespace codr {

/// Bad configuration, shape mismatch, or out-of-range argument.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Encoded data that cannot be decoded: truncation, out-of-range indexes,
/// misplaced dummy entries.
class CorruptionError : public std::runtime_error {
public:
    explicit CorruptionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace codr
