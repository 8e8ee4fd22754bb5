#pragma once

#include <stdexcept>
#include <string>

namespace roughsim {

/// Invalid parameters or an unsupported combination of options.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File-system or serialization failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace detail
}  // namespace roughsim
