#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dessec {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two automata disagree on the attributes of a shared event.
class AttributeConflictError : public Error {
public:
  using Error::Error;
};

/// Unknown state or event name.
class LookupError : public Error {
public:
  using Error::Error;
};

/// A construction exceeded the configured state cap.
class ResourceLimitError : public Error {
public:
  ResourceLimitError(const std::string& what, std::size_t limit)
      : Error(what + " exceeded the state limit of " + std::to_string(limit)),
        limit_(limit) {}

  std::size_t limit() const noexcept { return limit_; }

private:
  std::size_t limit_;
};

/// Inconsistent vulnerability specification (e.g. a vulnerable actuator that
/// is not controllable).
class SpecError : public Error {
public:
  using Error::Error;
};

class InvalidInputError : public Error {
public:
  using Error::Error;
};

class UnsupportedModeError : public Error {
public:
  using Error::Error;
};

/// Determinism violation while building an automaton.
class NondeterminismError : public Error {
public:
  using Error::Error;
};

/// Requested event is not enabled at the current execution state.
class IllegalEventError : public Error {
public:
  IllegalEventError(const std::string& event, std::vector<std::string> enabled)
      : Error(make_message(event, enabled)), enabled_(std::move(enabled)) {}

  const std::vector<std::string>& enabled() const noexcept { return enabled_; }

private:
  static std::string make_message(const std::string& event,
                                  const std::vector<std::string>& enabled) {
    std::string msg = "event '" + event + "' is not enabled; enabled: {";
    for (std::size_t i = 0; i < enabled.size(); ++i) {
      if (i) msg += ",";
      msg += enabled[i];
    }
    return msg + "}";
  }

  std::vector<std::string> enabled_;
};

/// Malformed model file. `line` is 1-based, 0 when unknown.
class ModelFormatError : public Error {
public:
  ModelFormatError(const std::string& source, int line, const std::string& msg)
      : Error(source + ":" + (line > 0 ? std::to_string(line) + ":" : "") +
              " " + msg),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace dessec
