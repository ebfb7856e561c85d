// SPDX-License-Identifier: BSD-3-Clause
// Fault types thrown by the landing library.
#pragma once

#include <stdexcept>
#include <string>

namespace land {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rotation_to_euler called within 1e-6 of the pitch singularity.
struct GimbalLock : Error {
    using Error::Error;
};

// rotation_log called within 1e-6 of a half-turn, where the axis is
// ill-conditioned.
struct NearPiRotation : Error {
    using Error::Error;
};

// Velocity-loop inversion would divide by a vanishing thrust.
struct ThrustTooLow : Error {
    using Error::Error;
};

// Collective law lost authority: cos(pitch)*cos(roll) <= 0.1.
struct AttitudeTooSteep : Error {
    using Error::Error;
};

struct StepTooLarge : Error {
    using Error::Error;
};

// apply_bond called on a state that is not in contact with the pad.
struct NotInContact : Error {
    using Error::Error;
};

// setpoints_for_phase queried for a terminal phase.
struct TerminalPhase : Error {
    using Error::Error;
};

struct EmptyLog : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ParseError : ConfigError {
    int line = 0;
    int column = 0;
    ParseError(int line_, int column_, const std::string& message)
        : ConfigError("parse error at line " + std::to_string(line_) + ", column " +
                      std::to_string(column_) + ": " + message),
          line(line_),
          column(column_) {}
};

struct UnknownKey : ConfigError {
    std::string key;
    UnknownKey(int line_, const std::string& key_)
        : ConfigError("unknown config key at line " + std::to_string(line_) + ": " + key_),
          key(key_) {}
};

// A field value violates a documented invariant; carries the invariant text.
struct ConstraintViolation : ConfigError {
    std::string constraint;
    explicit ConstraintViolation(const std::string& constraint_)
        : ConfigError("constraint violated: " + constraint_), constraint(constraint_) {}
};

// A fully assembled scenario fails validation; carries the invariant text.
struct ConfigInvalid : ConfigError {
    std::string constraint;
    explicit ConfigInvalid(const std::string& constraint_)
        : ConfigError("invalid scenario config: " + constraint_), constraint(constraint_) {}
};

}  // namespace land
