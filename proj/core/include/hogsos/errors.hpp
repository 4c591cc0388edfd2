#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hogsos {

/// Raised by the textual parsers (types, terms, laws). Carries the byte
/// offset of the offending token in the input.
struct ParseError : std::runtime_error {
  ParseError(std::string message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position(position) {}

  std::size_t position;
};

/// Raised when a term constructor is applied to children whose types do not
/// match the operator's slots, or when a lookup leaves a frozen universe.
struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hogsos
