#pragma once

#include <stdexcept>
#include <string>

namespace offlist {

// Malformed or unreadable input data (mail archives, commit exports, diffs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, or persisted state that no longer matches it.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace offlist
