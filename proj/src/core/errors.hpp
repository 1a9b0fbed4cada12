#pragma once

#include <stdexcept>
#include <string>

namespace spm {

// Error categories map 1:1 onto CLI exit codes / C API status values.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad preconditions, invalid arguments, malformed configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Corrupt or truncated data files.
struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Numerical failures: no sideband, stitching underdetermined, unwrap failure.
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace spm
