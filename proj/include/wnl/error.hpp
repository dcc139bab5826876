#pragma once

#include <stdexcept>
#include <string>

namespace wnl {

/// Raised for invalid input or a numerical condition the caller must fix.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that fails validation (bad parameter, mismatched grids, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace wnl
