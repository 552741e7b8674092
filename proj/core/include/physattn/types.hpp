#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace physattn {

/// Spatial extent and channel depth of one frame.
struct GridShape {
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t channels = 1;

  [[nodiscard]] std::size_t positions() const noexcept { return height * width; }
  [[nodiscard]] std::size_t size() const noexcept { return height * width * channels; }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// One frame of features, row-major over (y, x) with channels innermost.
class FeatureGrid {
 public:
  FeatureGrid(GridShape shape, std::vector<double> values);

  static FeatureGrid filled(GridShape shape, double value);

  /// Broadcast a channel vector over every spatial position.
  static FeatureGrid broadcast(std::size_t height, std::size_t width, std::span<const double> vec);

  [[nodiscard]] const GridShape& shape() const noexcept { return shape_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double at(std::size_t y, std::size_t x, std::size_t c) const;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

/// T frames of identically shaped feature grids. Storage is frame-major, then
/// row-major spatial, then channel. Immutable once built; every value finite.
class FeatureSequence {
 public:
  FeatureSequence(std::size_t frames, GridShape shape, std::vector<double> values);

  static FeatureSequence from_frames(std::span<const FeatureGrid> frames);

  /// Scalar-per-frame convenience (H = W = d = 1).
  static FeatureSequence scalars(std::span<const double> values);

  [[nodiscard]] std::size_t frames() const noexcept { return frames_; }
  [[nodiscard]] const GridShape& grid_shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t height() const noexcept { return shape_.height; }
  [[nodiscard]] std::size_t width() const noexcept { return shape_.width; }
  [[nodiscard]] std::size_t channels() const noexcept { return shape_.channels; }
  [[nodiscard]] std::size_t frame_size() const noexcept { return shape_.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const double> frame(std::size_t t) const;
  [[nodiscard]] FeatureGrid frame_grid(std::size_t t) const;
  [[nodiscard]] double at(std::size_t t, std::size_t y, std::size_t x, std::size_t c) const;

  /// Consume the sequence and hand back its storage.
  [[nodiscard]] std::vector<double> release() && noexcept { return std::move(values_); }

  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;

 private:
  std::size_t frames_;
  GridShape shape_;
  std::vector<double> values_;
};

/// Binary mask over one frame's spatial positions.
class MaskGrid {
 public:
  MaskGrid(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits);

  static MaskGrid filled(std::size_t height, std::size_t width, bool value);

  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  [[nodiscard]] bool at(std::size_t y, std::size_t x) const;
  [[nodiscard]] std::size_t count() const noexcept;

  friend bool operator==(const MaskGrid&, const MaskGrid&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> bits_;
};

/// Per-frame binary subject masks, broadcast over channels of the features
/// they gate.
class MaskSequence {
 public:
  MaskSequence(std::size_t frames, std::size_t height, std::size_t width,
               std::vector<std::uint8_t> bits);

  /// Build from real values; anything other than exactly 0.0 or 1.0 raises a
  /// ShapeError with fault non_binary.
  static MaskSequence from_values(std::size_t frames, std::size_t height, std::size_t width,
                                  std::span<const double> values);
  static MaskSequence from_grids(std::span<const MaskGrid> grids);
  static MaskSequence filled(std::size_t frames, std::size_t height, std::size_t width,
                             bool value);
  static MaskSequence scalars(std::span<const int> bits);

  [[nodiscard]] std::size_t frames() const noexcept { return frames_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t positions() const noexcept { return height_ * width_; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  [[nodiscard]] std::span<const std::uint8_t> frame(std::size_t t) const;
  [[nodiscard]] MaskGrid frame_grid(std::size_t t) const;
  [[nodiscard]] bool at(std::size_t t, std::size_t y, std::size_t x) const;

  friend bool operator==(const MaskSequence&, const MaskSequence&) = default;

 private:
  std::size_t frames_;
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> bits_;
};

/// Throws ShapeError naming the first mismatching dimension.
void validate_pair(const FeatureSequence& features, const MaskSequence& masks);

/// Periodic frame index t + offset on a ring of `frames`.
[[nodiscard]] constexpr std::size_t wrap_frame(std::size_t t, long offset, std::size_t frames) noexcept {
  const auto n = static_cast<long>(frames);
  long idx = (static_cast<long>(t) + offset) % n;
  if (idx < 0) idx += n;
  return static_cast<std::size_t>(idx);
}

}  // namespace physattn
