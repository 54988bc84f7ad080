// errors.hpp -- error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace anchorplay {

// Malformed input data (trace files, event logs). Message carries a line number
// where one is known.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A scenario or module configuration violates a documented constraint.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble: missing file, unreadable stream, failed write.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace anchorplay
