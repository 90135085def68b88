#pragma once

#include <stdexcept>
#include <string>

namespace polyinf {

/// Malformed or dimensionally inconsistent user input (files, flags, JSON).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested computation is not defined for the given inputs, e.g. vertex
/// enumeration on an unbounded set.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polyinf
