#include "physattn/masking.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "physattn/errors.hpp"

namespace physattn::masking {

SaliencyGrid::SaliencyGrid(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height_ == 0 || width_ == 0) throw DomainError("saliency grid extents must be at least 1");
  if (values_.size() != height_ * width_) {
    throw ShapeError(ShapeFault::element_count, "saliency grid expects " + std::to_string(height_ * width_) +
                                                    " values, got " + std::to_string(values_.size()));
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) throw ShapeError(ShapeFault::non_finite, "saliency value is not finite");
    if (v < 0.0) throw DomainError("saliency values must be nonnegative");
  }
}

double SaliencyGrid::at(std::size_t y, std::size_t x) const { return values_.at(y * width_ + x); }

SaliencyGrid aggregate_window(const AttentionMapStack& stack) {
  if (stack.maps.empty()) throw DomainError("attention window is empty");
  const std::size_t h = stack.maps.front().height();
  const std::size_t w = stack.maps.front().width();
  std::vector<double> sum(h * w, 0.0);
  for (const auto& map : stack.maps) {
    if (map.height() != h) throw ShapeError(ShapeFault::height, "attention maps differ in height");
    if (map.width() != w) throw ShapeError(ShapeFault::width, "attention maps differ in width");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += map.values()[i];
  }
  const auto n = static_cast<double>(stack.maps.size());
  for (double& v : sum) v /= n;
  return SaliencyGrid(h, w, std::move(sum));
}

std::size_t histogram_bin(double value, double lo, double hi, std::size_t bins) noexcept {
  if (!(hi > lo)) return 0;
  const double scaled = (value - lo) / (hi - lo) * static_cast<double>(bins);
  if (!(scaled > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(scaled), bins - 1);
}

OtsuSplit otsu_split(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw DomainError("Otsu threshold of an empty grid");
  if (bins < 2) throw DomainError("Otsu threshold needs at least 2 bins");
  for (const double v : values) {
    if (!std::isfinite(v)) throw DomainError("Otsu threshold of non-finite values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return OtsuSplit{lo, 0, 0.0};

  std::vector<double> hist(bins, 0.0);
  for (const double v : values) hist[histogram_bin(v, lo, hi, bins)] += 1.0;

  // Cumulative weight and first moment in bin-centre units (k + 0.5).
  const auto total = static_cast<double>(values.size());
  double total_moment = 0.0;
  for (std::size_t k = 0; k < bins; ++k) total_moment += hist[k] * (static_cast<double>(k) + 0.5);

  OtsuSplit best{lo, 0, -1.0};
  double weight0 = 0.0;
  double moment0 = 0.0;
  for (std::size_t edge = 1; edge < bins; ++edge) {
    weight0 += hist[edge - 1];
    moment0 += hist[edge - 1] * (static_cast<double>(edge - 1) + 0.5);
    const double weight1 = total - weight0;
    if (weight0 == 0.0 || weight1 == 0.0) continue;
    const double mean0 = moment0 / weight0;
    const double mean1 = (total_moment - moment0) / weight1;
    const double p0 = weight0 / total;
    const double variance = p0 * (1.0 - p0) * (mean0 - mean1) * (mean0 - mean1);
    if (variance > best.between_variance) {
      best.edge = edge;
      best.between_variance = variance;
    }
  }
  best.threshold = lo + static_cast<double>(best.edge) * (hi - lo) / static_cast<double>(bins);
  return best;
}

double otsu_threshold(std::span<const double> values, std::size_t bins) {
  return otsu_split(values, bins).threshold;
}

MaskGrid binarize(const SaliencyGrid& values, double threshold) {
  std::vector<std::uint8_t> bits(values.values().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = values.values()[i] > threshold ? 1 : 0;
  return MaskGrid(values.height(), values.width(), std::move(bits));
}

MaskGrid resize_mask(const MaskGrid& mask, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw DomainError("resize target extents must be at least 1");
  std::vector<std::uint8_t> bits(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t sy = y * mask.height() / height;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t sx = x * mask.width() / width;
      bits[y * width + x] = mask.at(sy, sx) ? 1 : 0;
    }
  }
  return MaskGrid(height, width, std::move(bits));
}

MaskGrid subject_mask(const AttentionMapStack& stack, std::size_t height, std::size_t width,
                      std::size_t bins) {
  const SaliencyGrid mean = aggregate_window(stack);
  const MaskGrid mask = binarize(mean, otsu_threshold(mean.values(), bins));
  if (mask.height() == height && mask.width() == width) return mask;
  return resize_mask(mask, height, width);
}

double intersection_over_union(const MaskGrid& a, const MaskGrid& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError(ShapeFault::element_count, "IoU of masks with different extents");
  }
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < a.bits().size(); ++i) {
    both += (a.bits()[i] && b.bits()[i]) ? 1 : 0;
    either += (a.bits()[i] || b.bits()[i]) ? 1 : 0;
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace physattn::masking
