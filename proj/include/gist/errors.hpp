#pragma once

#include <stdexcept>
#include <string>

namespace gist {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad dimensions, out-of-range parameters, malformed configuration.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Inconsistent subband structure: wrong counts, missing approximation.
class StructureError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// Covariance not invertible when no regularizer is applied.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// A mask selection with no pixels carrying the requested label.
class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gist
