#pragma once

#include <stdexcept>
#include <string>

namespace hesselm {

enum class ErrorCode {
  invalid_argument,
  dimension,
  singular,
  convergence,
  parse,
  io,
  training,
  version,
  internal,
};

// Base of all toolkit errors. The code survives the C boundary as a status
// value; the message is kept verbatim.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorCode::invalid_argument, w) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorCode::dimension, w) {}
};

struct SingularityError : Error {
  explicit SingularityError(const std::string& w) : Error(ErrorCode::singular, w) {}
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& w) : Error(ErrorCode::convergence, w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorCode::parse, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

struct TrainingError : Error {
  explicit TrainingError(const std::string& w) : Error(ErrorCode::training, w) {}
};

// Leverage at (or numerically at) 1: the leave-one-out residual is undefined.
struct DegenerateLeverageError : TrainingError {
  explicit DegenerateLeverageError(const std::string& w) : TrainingError(w) {}
};

struct VersionError : Error {
  explicit VersionError(const std::string& w) : Error(ErrorCode::version, w) {}
};

}  // namespace hesselm
