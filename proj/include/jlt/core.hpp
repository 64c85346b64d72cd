#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jlt {

// Error hierarchy. Every failure raised by the library derives from jlt::Error
// so callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (e.g. |E| < 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

class NoEigenvalues : public Error {
 public:
  using Error::Error;
};

// Malformed external input (JSON spec files, CLI arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

enum class Sign { plus, minus };

inline constexpr double sign_factor(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

inline constexpr double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline constexpr double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

// Inclusive range of integer site indices.
struct SiteRange {
  long lo = 0;
  long hi = -1;

  constexpr bool empty() const { return hi < lo; }
  constexpr long size() const { return empty() ? 0 : hi - lo + 1; }
  constexpr bool contains(long n) const { return lo <= n && n <= hi; }
  constexpr bool contains(const SiteRange& other) const {
    return other.empty() || (lo <= other.lo && other.hi <= hi);
  }
  friend constexpr bool operator==(const SiteRange&, const SiteRange&) = default;
};

}  // namespace jlt
