#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "physattn/types.hpp"

namespace physattn::masking {

inline constexpr std::size_t kDefaultBins = 256;
inline constexpr std::size_t kDefaultWindow = 5;

/// Nonnegative, unnormalized saliency over one frame's positions.
class SaliencyGrid {
 public:
  SaliencyGrid(std::size_t height, std::size_t width, std::vector<double> values);

  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double at(std::size_t y, std::size_t x) const;

  friend bool operator==(const SaliencyGrid&, const SaliencyGrid&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

/// The most recent subject cross-attention maps for one frame, oldest first.
struct AttentionMapStack {
  std::vector<SaliencyGrid> maps;
};

/// Elementwise arithmetic mean over the window. Throws DomainError on an
/// empty window and ShapeError when map extents disagree.
[[nodiscard]] SaliencyGrid aggregate_window(const AttentionMapStack& stack);

/// Result of Otsu's method on a `bins`-bin histogram spanning [min, max].
struct OtsuSplit {
  double threshold = 0.0;          ///< min + edge * (max - min) / bins
  std::size_t edge = 0;            ///< 1..bins-1; 0 for a constant input
  double between_variance = 0.0;   ///< in units of (bin width)^2
};

/// Bin of `value` in a `bins`-bin histogram over [lo, hi]; hi maps to the
/// last bin. Shared by the histogram and by callers that need the same
/// discretization.
[[nodiscard]] std::size_t histogram_bin(double value, double lo, double hi, std::size_t bins) noexcept;

/// Picks the bin edge maximizing between-class variance, where class 0 holds
/// bins below the edge and each bin is represented by its centre. Ties go to
/// the lowest edge. A constant input returns its value with edge 0.
[[nodiscard]] OtsuSplit otsu_split(std::span<const double> values, std::size_t bins = kDefaultBins);

[[nodiscard]] double otsu_threshold(std::span<const double> values, std::size_t bins = kDefaultBins);

/// 1 where value > threshold, else 0.
[[nodiscard]] MaskGrid binarize(const SaliencyGrid& values, double threshold);

/// Nearest-neighbour resampling with floor index mapping y' -> y'*H/H'.
[[nodiscard]] MaskGrid resize_mask(const MaskGrid& mask, std::size_t height, std::size_t width);

/// aggregate_window -> otsu_threshold -> binarize -> resize_mask.
[[nodiscard]] MaskGrid subject_mask(const AttentionMapStack& stack, std::size_t height, std::size_t width,
                                    std::size_t bins = kDefaultBins);

/// |A and B| / |A or B|; 1 when both are empty.
[[nodiscard]] double intersection_over_union(const MaskGrid& a, const MaskGrid& b);

}  // namespace physattn::masking
