// Error types shared across the library. Callers that surface errors to a
// process exit code should map: invalid_input/dimension -> config error,
// parse/io -> data error, numerical -> numerical failure.

#pragma once

#include <stdexcept>
#include <string>

namespace gastl {

// Bad argument values: out-of-range counts, non-finite inputs, empty data.
class invalid_input_error : public std::invalid_argument {
 public:
  explicit invalid_input_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// Matrix/vector shape disagreement between operands.
class dimension_error : public std::invalid_argument {
 public:
  explicit dimension_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// Malformed input files (CSV): carries a message with the file and line.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Breakdown inside a numerical routine: singular system, non-finite
// intermediate, diverged iteration.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace gastl
