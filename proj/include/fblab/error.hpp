#pragma once

#include <stdexcept>
#include <string>

namespace fblab {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind
{
  config,        ///< malformed input, violated precondition
  admissibility, ///< lambda <= -lambda1, coefficient sign failure
  numerical,     ///< non-convergence
  geometry       ///< ball leaves the box, point out of domain, too few points
};

inline const char* to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::admissibility: return "admissibility";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::geometry: return "geometry";
  }
  return "unknown";
}

inline int exit_code(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::admissibility: return 3;
    case ErrorKind::numerical: return 4;
    case ErrorKind::geometry: return 5;
  }
  return 1;
}

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what)
    , kind_(kind)
  {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
  if (!cond)
    throw Error(kind, what);
}

} // namespace fblab
