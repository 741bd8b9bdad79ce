#pragma once

#include <stdexcept>
#include <string>

namespace hetero {

/// Raised for invalid input: bad parameters, malformed files, violated
/// preconditions. The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hetero
