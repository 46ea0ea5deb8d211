#pragma once

#include <stdexcept>
#include <string>

namespace dualmix {

// Filesystem-level failure (missing input, unwritable output). Kept distinct
// from std::invalid_argument / std::runtime_error so the CLI can map it to
// its own exit code.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dualmix
