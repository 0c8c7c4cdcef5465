#pragma once

#include <stdexcept>
#include <string>

namespace tlp {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input file or record does not parse: malformed JSON, wrong field type,
/// unrecognized enum string. Messages carry the source name and, for
/// line-oriented formats, the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Parsed data or call arguments violate a documented invariant or
/// precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure: missing input, unreadable file, unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlp
