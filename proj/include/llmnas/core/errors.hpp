#pragma once

#include <stdexcept>
#include <string>

namespace llmnas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A run log whose content cannot be trusted (malformed non-final record,
// out-of-order iterations).
class CorruptLog : public Error {
 public:
  using Error::Error;
};

// The run log could not be opened or written. Aborts a search.
class LogWriteError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class EmptyResponse : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Rank statistics are undefined for constant input.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

}  // namespace llmnas
