#pragma once

#include <stdexcept>
#include <string>

namespace relret {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad configuration or bad input data (CLI maps these to exit code 1).
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed file content: corpora, catalogs, checkpoints, feature files.
struct DataError : Error {
    using Error::Error;
};

/// API misuse: shape mismatches, out-of-range indices, wrong call order.
struct UsageError : Error {
    using Error::Error;
};

/// Numeric-domain violation: NaN/Inf where finite values are required,
/// degenerate vectors where a norm is needed.
struct NumericError : Error {
    using Error::Error;
};

} // namespace relret
