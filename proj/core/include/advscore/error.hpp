#pragma once

#include <stdexcept>
#include <string>

namespace advscore {

// Root of the toolkit's error hierarchy. Subclasses distinguish the
// failure classes callers are expected to branch on (the CLI maps
// NumericalError to exit code 2 and everything else to exit code 1).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A value outside an operation's documented domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A malformed configuration object (quadrature grids, fit settings, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two structures that must agree (e.g. parameter key sets vs. a response
// matrix) do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// An operation that needs data received none.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// A subject pool required to be nonempty was empty.
class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

// Optimization produced a non-finite value; the message names the epoch.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message carries file and line context.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

// A record collides with one already present (duplicate ids or pairs).
class ConflictError : public Error {
 public:
  using Error::Error;
};

// A record references an id that was never declared, or a declared id is
// never referenced.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

// Regression target collapsed to a single class.
class DegenerateTargetError : public Error {
 public:
  using Error::Error;
};

// Normal equations are singular; the message suggests a positive l2.
class SingularityError : public Error {
 public:
  using Error::Error;
};

}  // namespace advscore
