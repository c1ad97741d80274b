#pragma once

#include <stdexcept>
#include <string>

namespace specdim {

// Bad user input: malformed specs, violated preconditions. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Work would exceed a configured cap (matrix size, cell budget). CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specdim
