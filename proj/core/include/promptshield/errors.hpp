#pragma once

#include <stdexcept>
#include <string>

namespace promptshield {

// Base class for all promptshield errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data: ledger lines, scenario files, corpus files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Upstream transport failures: connect errors, timeouts, non-2xx statuses.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace promptshield
