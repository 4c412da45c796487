#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace embscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed validation. `where()` names the offending file, line or JSON
/// field path (e.g. `$.sentences[1].tokens[0].xy`).
class ValidationError : public Error {
 public:
  ValidationError(std::string where, const std::string& message)
      : Error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Numerical failure inside the reduction engine.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace embscope
