#pragma once

#include <stdexcept>
#include <string>

namespace fracvar {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `offset` is the byte position in the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error("parse error at byte " + std::to_string(offset) + ": " + msg),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Unbound variable, bad arity, disallowed variable for a slot.
class EvalError : public Error {
 public:
  using Error::Error;
};

// log of a non-positive number, gamma pole, non-finite result.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad grid, off-node query, grid mismatch between operands.
class GridError : public Error {
 public:
  using Error::Error;
};

// Order function leaves (0,1) on the validation lattice, bad gamma weights.
class OrderError : public Error {
 public:
  using Error::Error;
};

// Config file problems; message names the section and key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracvar
