#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hwnroute {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (gain grid, scenario config, checkpoint, CSV).
/// `line` is 1-based for text formats and a byte offset for binary ones.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class RoutingFailure { dead_end, disconnected, hop_cap };

const char* to_string(RoutingFailure failure) noexcept;

/// Raised by step policies when no admissible next hop exists.
class RoutingError : public Error {
 public:
  explicit RoutingError(RoutingFailure cause)
      : Error(to_string(cause)), cause_(cause) {}

  RoutingFailure cause() const noexcept { return cause_; }

 private:
  RoutingFailure cause_;
};

inline const char* to_string(RoutingFailure failure) noexcept {
  switch (failure) {
    case RoutingFailure::dead_end:
      return "dead end";
    case RoutingFailure::disconnected:
      return "disconnected";
    case RoutingFailure::hop_cap:
      return "hop cap";
  }
  return "unknown";
}

}  // namespace hwnroute
