#include "physattn/errors.hpp"

#include <utility>

namespace physattn {

std::string_view to_string(ShapeFault fault) noexcept {
  switch (fault) {
    case ShapeFault::frame_count:
      return "frame-count";
    case ShapeFault::height:
      return "height";
    case ShapeFault::width:
      return "width";
    case ShapeFault::channels:
      return "channels";
    case ShapeFault::element_count:
      return "element-count";
    case ShapeFault::non_binary:
      return "non-binary";
    case ShapeFault::non_finite:
      return "non-finite";
  }
  return "unknown";
}

namespace {

std::string shape_message(ShapeFault fault, const std::string& detail) {
  const bool value_fault = fault == ShapeFault::non_binary || fault == ShapeFault::non_finite;
  return std::string(to_string(fault)) + (value_fault ? " value: " : " mismatch: ") + detail;
}

}  // namespace

ShapeError::ShapeError(ShapeFault fault, const std::string& detail)
    : Error(shape_message(fault, detail)), fault_(fault) {}

DivergenceError::DivergenceError(std::string stage, std::size_t iteration)
    : Error("numeric overflow in " + stage + " at iteration " + std::to_string(iteration)),
      stage_(std::move(stage)),
      iteration_(iteration) {}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column,
                       std::size_t offset)
    : Error(line == 0 ? what
                      : what + " (line " + std::to_string(line) + ", column " +
                            std::to_string(column) + ", offset " + std::to_string(offset) + ")"),
      line_(line),
      column_(column),
      offset_(offset) {}

}  // namespace physattn
