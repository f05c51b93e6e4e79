#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geofence {

enum class ErrorKind {
  InvalidInput,
  InvalidGeometry,
  DegenerateGeometry,
  SridMismatch,
  ProjectionUndefined,
  ModelUnavailable,
  Parse,
  DanglingReference,
  Config,
  UndefinedBearing,
  InvalidExtent,
  LayerMismatch,
  BenchPrecondition,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::SridMismatch: return "srid-mismatch";
    case ErrorKind::ProjectionUndefined: return "projection-undefined";
    case ErrorKind::ModelUnavailable: return "model-unavailable";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::DanglingReference: return "dangling-reference";
    case ErrorKind::Config: return "config";
    case ErrorKind::UndefinedBearing: return "undefined-bearing";
    case ErrorKind::InvalidExtent: return "invalid-extent";
    case ErrorKind::LayerMismatch: return "layer-mismatch";
    case ErrorKind::BenchPrecondition: return "bench-precondition";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with a position. `line` is 1-based (0 if unknown); `offset`
/// is a byte offset into the input (npos if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error(ErrorKind::Parse, what), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

/// Input record failure tied to one field. `field` is 0-based; -1 means
/// the record as a whole (e.g. wrong field count).
class FieldError : public Error {
 public:
  FieldError(const std::string& what, int field) : Error(ErrorKind::InvalidInput, what), field_(field) {}

  int field() const noexcept { return field_; }

 private:
  int field_;
};

}  // namespace geofence
