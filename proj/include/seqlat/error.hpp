#pragma once

#include <stdexcept>
#include <string>

namespace seqlat {

/// Raised for malformed files, invalid flags or data that violates a
/// documented contract. The CLI maps it to exit status 2; anything else
/// escaping a command is an internal fault (exit 1).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqlat
