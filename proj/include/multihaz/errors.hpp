#pragma once

#include <stdexcept>
#include <string>

namespace multihaz {

// Exit codes used by the CLI. 0 means success; 5 is reserved for
// verification failures (no exception maps to it).
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;
inline constexpr int kExitDataError = 4;
inline constexpr int kExitVerifyFailure = 5;

/// Invalid configuration, flags, or query parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that parses but violates a documented invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multihaz
