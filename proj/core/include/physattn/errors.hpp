#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace physattn {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the operation's mathematical domain (alpha outside
/// [0,1], too few frames for a metric, zero-norm frame for a cosine, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Which part of a feature/mask pair failed validation.
enum class ShapeFault {
  frame_count,
  height,
  width,
  channels,
  element_count,
  non_binary,
  non_finite,
};

std::string_view to_string(ShapeFault fault) noexcept;

class ShapeError : public Error {
 public:
  ShapeError(ShapeFault fault, const std::string& detail);

  [[nodiscard]] ShapeFault fault() const noexcept { return fault_; }

 private:
  ShapeFault fault_;
};

/// Raised when an update produces a non-finite value. Carries the name of the
/// stage that diverged (a prior label, "attention", "denoiser") and the
/// virtual-time iteration or sampling step at which it happened.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string stage, std::size_t iteration);

  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
  [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::string stage_;
  std::size_t iteration_;
};

/// Malformed input text or bytes. Line and column are 1-based; offset is the
/// 0-based byte position where parsing stopped. Line 0 means the document was
/// syntactically valid but structurally wrong (missing key, wrong type).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column, std::size_t offset);

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::size_t offset_;
};

}  // namespace physattn
