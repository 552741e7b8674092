#include "physattn/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "physattn/errors.hpp"

namespace physattn {

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ShapeError(ShapeFault::non_finite, "element " + std::to_string(i) + " is not finite");
    }
  }
}

void require_extent(std::size_t value, const char* name) {
  if (value == 0) throw DomainError(std::string(name) + " must be at least 1");
}

void require_binary(std::span<const std::uint8_t> bits) {
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      throw ShapeError(ShapeFault::non_binary,
                       "mask element " + std::to_string(i) + " = " + std::to_string(bits[i]));
    }
  }
}

}  // namespace

// FeatureGrid

FeatureGrid::FeatureGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  require_extent(shape_.height, "height");
  require_extent(shape_.width, "width");
  require_extent(shape_.channels, "channels");
  if (values_.size() != shape_.size()) {
    throw ShapeError(ShapeFault::element_count,
                     "expected " + std::to_string(shape_.size()) + " values, got " +
                         std::to_string(values_.size()));
  }
  require_finite(values_);
}

FeatureGrid FeatureGrid::filled(GridShape shape, double value) {
  return FeatureGrid(shape, std::vector<double>(shape.size(), value));
}

FeatureGrid FeatureGrid::broadcast(std::size_t height, std::size_t width,
                                   std::span<const double> vec) {
  std::vector<double> values;
  values.reserve(height * width * vec.size());
  for (std::size_t p = 0; p < height * width; ++p) values.insert(values.end(), vec.begin(), vec.end());
  return FeatureGrid({height, width, vec.size()}, std::move(values));
}

double FeatureGrid::at(std::size_t y, std::size_t x, std::size_t c) const {
  return values_.at((y * shape_.width + x) * shape_.channels + c);
}

// FeatureSequence

FeatureSequence::FeatureSequence(std::size_t frames, GridShape shape, std::vector<double> values)
    : frames_(frames), shape_(shape), values_(std::move(values)) {
  require_extent(frames_, "frame count");
  require_extent(shape_.height, "height");
  require_extent(shape_.width, "width");
  require_extent(shape_.channels, "channels");
  if (values_.size() != frames_ * shape_.size()) {
    throw ShapeError(ShapeFault::element_count,
                     "expected " + std::to_string(frames_ * shape_.size()) + " values, got " +
                         std::to_string(values_.size()));
  }
  require_finite(values_);
}

FeatureSequence FeatureSequence::from_frames(std::span<const FeatureGrid> frames) {
  if (frames.empty()) throw DomainError("frame count must be at least 1");
  const GridShape shape = frames.front().shape();
  std::vector<double> values;
  values.reserve(frames.size() * shape.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].shape() != shape) {
      throw ShapeError(ShapeFault::element_count,
                       "frame " + std::to_string(t) + " differs in shape from frame 0");
    }
    const auto v = frames[t].values();
    values.insert(values.end(), v.begin(), v.end());
  }
  return FeatureSequence(frames.size(), shape, std::move(values));
}

FeatureSequence FeatureSequence::scalars(std::span<const double> values) {
  return FeatureSequence(values.size(), {1, 1, 1}, std::vector<double>(values.begin(), values.end()));
}

std::span<const double> FeatureSequence::frame(std::size_t t) const {
  if (t >= frames_) throw DomainError("frame index " + std::to_string(t) + " out of range");
  return std::span<const double>(values_).subspan(t * frame_size(), frame_size());
}

FeatureGrid FeatureSequence::frame_grid(std::size_t t) const {
  const auto f = frame(t);
  return FeatureGrid(shape_, std::vector<double>(f.begin(), f.end()));
}

double FeatureSequence::at(std::size_t t, std::size_t y, std::size_t x, std::size_t c) const {
  return values_.at(((t * shape_.height + y) * shape_.width + x) * shape_.channels + c);
}

// MaskGrid

MaskGrid::MaskGrid(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  require_extent(height_, "height");
  require_extent(width_, "width");
  if (bits_.size() != height_ * width_) {
    throw ShapeError(ShapeFault::element_count,
                     "expected " + std::to_string(height_ * width_) + " mask values, got " +
                         std::to_string(bits_.size()));
  }
  require_binary(bits_);
}

MaskGrid MaskGrid::filled(std::size_t height, std::size_t width, bool value) {
  return MaskGrid(height, width, std::vector<std::uint8_t>(height * width, value ? 1 : 0));
}

bool MaskGrid::at(std::size_t y, std::size_t x) const { return bits_.at(y * width_ + x) != 0; }

std::size_t MaskGrid::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

// MaskSequence

MaskSequence::MaskSequence(std::size_t frames, std::size_t height, std::size_t width,
                           std::vector<std::uint8_t> bits)
    : frames_(frames), height_(height), width_(width), bits_(std::move(bits)) {
  require_extent(frames_, "frame count");
  require_extent(height_, "height");
  require_extent(width_, "width");
  if (bits_.size() != frames_ * height_ * width_) {
    throw ShapeError(ShapeFault::element_count,
                     "expected " + std::to_string(frames_ * height_ * width_) +
                         " mask values, got " + std::to_string(bits_.size()));
  }
  require_binary(bits_);
}

MaskSequence MaskSequence::from_values(std::size_t frames, std::size_t height, std::size_t width,
                                       std::span<const double> values) {
  std::vector<std::uint8_t> bits(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) {
      bits[i] = 0;
    } else if (values[i] == 1.0) {
      bits[i] = 1;
    } else {
      throw ShapeError(ShapeFault::non_binary,
                       "mask element " + std::to_string(i) + " = " + std::to_string(values[i]));
    }
  }
  return MaskSequence(frames, height, width, std::move(bits));
}

MaskSequence MaskSequence::from_grids(std::span<const MaskGrid> grids) {
  if (grids.empty()) throw DomainError("frame count must be at least 1");
  const std::size_t h = grids.front().height();
  const std::size_t w = grids.front().width();
  std::vector<std::uint8_t> bits;
  bits.reserve(grids.size() * h * w);
  for (std::size_t t = 0; t < grids.size(); ++t) {
    if (grids[t].height() != h) {
      throw ShapeError(ShapeFault::height, "mask frame " + std::to_string(t) + " height differs");
    }
    if (grids[t].width() != w) {
      throw ShapeError(ShapeFault::width, "mask frame " + std::to_string(t) + " width differs");
    }
    const auto b = grids[t].bits();
    bits.insert(bits.end(), b.begin(), b.end());
  }
  return MaskSequence(grids.size(), h, w, std::move(bits));
}

MaskSequence MaskSequence::filled(std::size_t frames, std::size_t height, std::size_t width,
                                  bool value) {
  return MaskSequence(frames, height, width,
                      std::vector<std::uint8_t>(frames * height * width, value ? 1 : 0));
}

MaskSequence MaskSequence::scalars(std::span<const int> bits) {
  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) {
      throw ShapeError(ShapeFault::non_binary,
                       "mask element " + std::to_string(i) + " = " + std::to_string(bits[i]));
    }
    out[i] = static_cast<std::uint8_t>(bits[i]);
  }
  return MaskSequence(bits.size(), 1, 1, std::move(out));
}

std::span<const std::uint8_t> MaskSequence::frame(std::size_t t) const {
  if (t >= frames_) throw DomainError("frame index " + std::to_string(t) + " out of range");
  return std::span<const std::uint8_t>(bits_).subspan(t * positions(), positions());
}

MaskGrid MaskSequence::frame_grid(std::size_t t) const {
  const auto f = frame(t);
  return MaskGrid(height_, width_, std::vector<std::uint8_t>(f.begin(), f.end()));
}

bool MaskSequence::at(std::size_t t, std::size_t y, std::size_t x) const {
  return bits_.at((t * height_ + y) * width_ + x) != 0;
}

void validate_pair(const FeatureSequence& features, const MaskSequence& masks) {
  if (features.frames() != masks.frames()) {
    throw ShapeError(ShapeFault::frame_count, "features have " + std::to_string(features.frames()) +
                                                  " frames, masks have " +
                                                  std::to_string(masks.frames()));
  }
  if (features.height() != masks.height()) {
    throw ShapeError(ShapeFault::height, "features have height " +
                                             std::to_string(features.height()) +
                                             ", masks have " + std::to_string(masks.height()));
  }
  if (features.width() != masks.width()) {
    throw ShapeError(ShapeFault::width, "features have width " + std::to_string(features.width()) +
                                            ", masks have " + std::to_string(masks.width()));
  }
}

}  // namespace physattn
