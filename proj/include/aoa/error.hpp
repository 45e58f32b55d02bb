#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace aoa {

enum class ErrorKind {
  kDegenerateGeometry,
  kIllConditioned,
  kOutOfRange,
  kInvalidScatter,
  kUndefinedCrlb,
  kUnidentifiableGeometry,
  kUsage,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type. `condition()` carries
// the condition estimate for ill-conditioned solves and is NaN otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        double condition = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), kind_(kind), condition_(condition) {}

  ErrorKind kind() const { return kind_; }
  double condition() const { return condition_; }

 private:
  ErrorKind kind_;
  double condition_;
};

}  // namespace aoa
