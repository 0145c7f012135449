#pragma once

#include <stdexcept>
#include <string>

namespace sncoint {

/// Malformed input: bad shapes, invalid parameters, unparsable files.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that cannot be carried out on otherwise valid input
/// (singular systems, degenerate normalizers).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

} // namespace detail
} // namespace sncoint
