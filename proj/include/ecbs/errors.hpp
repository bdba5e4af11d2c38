#pragma once

#include <stdexcept>
#include <string>

namespace ecbs {

// Malformed envelope or encoded value (bad prefix, bad width, off-curve point, ...).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Unknown curve name, unparsable curve file, or parameters failing validation.
struct CurveError : std::runtime_error {
    explicit CurveError(const std::string& what) : std::runtime_error(what) {}
};

// Protocol-state violation, e.g. signing twice with one session.
struct StateError : std::runtime_error {
    explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

// Bounded resampling of degenerate random draws exhausted.
struct RandomnessError : std::runtime_error {
    explicit RandomnessError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ecbs
