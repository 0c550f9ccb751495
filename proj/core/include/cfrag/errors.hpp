#pragma once

#include <stdexcept>
#include <string>

namespace cfrag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model description (bad dimensions, negative constants, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A molecule or compartment count left the 64-bit range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Configuration document could not be turned into a model. `key()` names
/// the offending entry as a dotted path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace cfrag
