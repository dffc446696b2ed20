#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freehull {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible variable counts, coefficient shapes or matrix sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Polynomial text that does not conform to the grammar. position() is a
// zero-based byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error("parse error at position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace freehull
