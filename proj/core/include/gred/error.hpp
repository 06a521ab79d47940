#pragma once

#include <stdexcept>
#include <string>

namespace gred {

/// A parameter set violates a model constraint (e.g. A1 < A2 + 1).
class ConstraintError : public std::invalid_argument {
 public:
  explicit ConstraintError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace gred
