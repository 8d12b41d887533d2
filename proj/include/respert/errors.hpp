#pragma once

#include <stdexcept>

namespace respert {

// Error taxonomy shared across the library. Misuse of an interface derives
// from std::invalid_argument; failures that depend on runtime data derive
// from std::runtime_error.

struct InvalidEdge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidResistance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A schedule rule evaluated to a probability outside [0,1].
struct ScheduleOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejection sampling could not collect enough null-conditioned replicates.
struct CalibrationStarved : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace respert
