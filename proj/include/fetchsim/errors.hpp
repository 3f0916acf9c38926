#pragma once

#include <stdexcept>
#include <string>

namespace fetchsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario or machine document does not match its schema. `path()` names
/// the offending field, e.g. `grid.rows[3]`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A loaded entity breaks a model invariant.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string entity, const std::string& message)
      : Error(entity + ": " + message), entity_(std::move(entity)) {}
  const std::string& entity() const noexcept { return entity_; }

 private:
  std::string entity_;
};

class UndeclaredKeyAccess : public Error { using Error::Error; };
class MissingKey : public Error { using Error::Error; };
class UnmappedOutcome : public Error { using Error::Error; };
class ClockOverflow : public Error { using Error::Error; };
class StepBudgetExceeded : public Error { using Error::Error; };
class InvalidMachine : public Error { using Error::Error; };

class StartOccupied : public Error { using Error::Error; };
class SensorPoseOccupied : public Error { using Error::Error; };
class InvalidAnnotation : public Error { using Error::Error; };
class RoomUnreachable : public Error { using Error::Error; };

}  // namespace fetchsim
