#pragma once

#include <stdexcept>
#include <string>

namespace finin {

// Every failure the engine can raise, grouped by the exit-code taxonomy:
// config (1), data (2), numeric (3), io (4).
enum class ErrKind {
  // config
  ConfigError,
  InvalidParameter,
  // data
  MalformedRow,
  ConstraintViolation,
  NonMonotonicDates,
  MalformedRecord,
  SentimentOutOfRange,
  EmptyCalendar,
  EmptyText,
  MalformedFile,
  DimensionMismatch,
  MissingKey,
  InsufficientHistory,
  EmptySplit,
  InsufficientData,
  MissingNextClose,
  EmptyInput,
  NoNews,
  CheckpointMismatch,
  // numeric
  ShapeMismatch,
  AllMasked,
  DegenerateVariance,
  TooFewDays,
  NumericFailure,
  // io
  IoFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrKind kind() const { return kind_; }

  // Process exit code for the CLI: 1 config, 2 data, 3 numeric, 4 io.
  int exit_code() const {
    switch (kind_) {
      case ErrKind::ConfigError:
      case ErrKind::InvalidParameter:
        return 1;
      case ErrKind::ShapeMismatch:
      case ErrKind::AllMasked:
      case ErrKind::DegenerateVariance:
      case ErrKind::TooFewDays:
      case ErrKind::NumericFailure:
        return 3;
      case ErrKind::IoFailure:
        return 4;
      default:
        return 2;
    }
  }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void raise(ErrKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline const char* err_name(ErrKind k) {
  switch (k) {
    case ErrKind::ConfigError: return "ConfigError";
    case ErrKind::InvalidParameter: return "InvalidParameter";
    case ErrKind::MalformedRow: return "MalformedRow";
    case ErrKind::ConstraintViolation: return "ConstraintViolation";
    case ErrKind::NonMonotonicDates: return "NonMonotonicDates";
    case ErrKind::MalformedRecord: return "MalformedRecord";
    case ErrKind::SentimentOutOfRange: return "SentimentOutOfRange";
    case ErrKind::EmptyCalendar: return "EmptyCalendar";
    case ErrKind::EmptyText: return "EmptyText";
    case ErrKind::MalformedFile: return "MalformedFile";
    case ErrKind::DimensionMismatch: return "DimensionMismatch";
    case ErrKind::MissingKey: return "MissingKey";
    case ErrKind::InsufficientHistory: return "InsufficientHistory";
    case ErrKind::EmptySplit: return "EmptySplit";
    case ErrKind::InsufficientData: return "InsufficientData";
    case ErrKind::MissingNextClose: return "MissingNextClose";
    case ErrKind::EmptyInput: return "EmptyInput";
    case ErrKind::NoNews: return "NoNews";
    case ErrKind::CheckpointMismatch: return "CheckpointMismatch";
    case ErrKind::ShapeMismatch: return "ShapeMismatch";
    case ErrKind::AllMasked: return "AllMasked";
    case ErrKind::DegenerateVariance: return "DegenerateVariance";
    case ErrKind::TooFewDays: return "TooFewDays";
    case ErrKind::NumericFailure: return "NumericFailure";
    case ErrKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace finin
