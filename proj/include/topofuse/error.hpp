#pragma once

#include <stdexcept>
#include <string>

namespace topofuse {

/// Raised for invalid inputs, malformed files and contract violations that a
/// caller can report to the user.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace topofuse
