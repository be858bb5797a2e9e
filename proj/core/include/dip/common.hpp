#pragma once

#include <stdexcept>
#include <string>

namespace dip {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem problems: missing paths, unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input content (CSV cells, report payloads).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Degenerate numerics, e.g. a zero-variance target.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Non-fatal diagnostics (finite-sample monotonicity violations and the like).
// Messages go to stderr; tests can swap the sink.
using WarnSink = void (*)(const std::string&);
void warn(const std::string& message);
WarnSink set_warn_sink(WarnSink sink);

}  // namespace dip
