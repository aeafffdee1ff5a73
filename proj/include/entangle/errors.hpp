#pragma once

#include <stdexcept>
#include <string>

namespace entangle {

// Base for every error raised by the library. The CLI maps the concrete
// type onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class MatrixError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Raised by a factor update whose contraction vanishes; the multistart
// driver catches it and replaces the start.
class ZeroContraction : public Error {
 public:
  using Error::Error;
};

}  // namespace entangle
