#pragma once

#include <stdexcept>
#include <string>

namespace tgbtsp {

// Base for every diagnostic raised by the library. `kind` is a short stable
// tag ("malformed-header", "no-root", ...) that callers can switch on.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Moment combination outside the region a Beta distribution can realize.
class InfeasibleMoments : public Error {
 public:
  using Error::Error;
};

}  // namespace tgbtsp
