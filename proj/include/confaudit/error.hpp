#pragma once

#include <stdexcept>
#include <string>

namespace confaudit {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems with input data: bad files, shape mismatches, invalid targets.
struct DataError : Error {
    using Error::Error;
};

// Caller misuse: bad configuration, out-of-range parameters.
struct InvalidArgument : Error {
    using Error::Error;
};

// A metric is undefined for the given input (single-class labels,
// zero-variance truth, constant correlation input).
struct UndefinedMetric : Error {
    using Error::Error;
};

}  // namespace confaudit
