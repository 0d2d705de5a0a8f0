#pragma once

#include <stdexcept>
#include <string>

namespace fibfrac {

/// Argument outside the operation's domain (bad family index, order, angle, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integer result does not fit the target type.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A combinatorial structure that should hold (palindrome split, five-partite
/// reassembly) does not.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Landmark configuration cannot determine a similarity (collinear, too few).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derived IFS does not reproduce its reference curve.
class SelfSimilarityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw DomainError(msg);
}

}  // namespace detail
}  // namespace fibfrac
