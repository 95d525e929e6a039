// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relight {

enum class ErrorKind {
    Parse,
    Structural,
    Numerical,
    Shape,
    DegenerateInput,
    Precondition,
    Bounds,
    Config,
    Io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Structural: return "structural error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::DegenerateInput: return "degenerate input";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Bounds: return "out of bounds";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

// All library failures are reported through this exception; callers switch on kind().
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message) {
    throw Error(kind, message);
}

}  // namespace relight
