#pragma once

#include <stdexcept>
#include <string>

namespace sbpsat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedOrder : Error {
  using Error::Error;
};

struct GridTooSmall : Error {
  using Error::Error;
};

// Thrown only where an inadmissible penalty must be rejected (CLI gating);
// assemblers flag the system instead so instability demos stay possible.
struct InadmissiblePenalty : Error {
  using Error::Error;
};

struct NonpositiveCoefficient : Error {
  using Error::Error;
};

struct SingularMapping : Error {
  using Error::Error;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NonFiniteState : Error {
  NonFiniteState(const std::string& what, long step_index, double time)
      : Error(what), step(step_index), t(time) {}
  long step;
  double t;
};

struct PowerIterationNoConverge : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct NonPositiveEnergy : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace sbpsat
