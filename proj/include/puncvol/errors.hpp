#pragma once

#include <stdexcept>
#include <string>

namespace puncvol {

/// Precondition on an argument failed (wrong shape, out-of-range index, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A field was evaluated too close to one of its singular points.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometric degeneracy, e.g. a parallel frame requested at the pole itself.
class DegeneratePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent run configuration (grid kind vs field, radius vs singular set).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed residual exceeded its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request outside the supported resource envelope (e.g. symbolic n > 3).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace puncvol
