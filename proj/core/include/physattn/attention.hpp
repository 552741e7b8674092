#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "physattn/params.hpp"
#include "physattn/rng.hpp"
#include "physattn/types.hpp"

namespace physattn::attention {

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix(std::size_t n, std::vector<double> values);

  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * n_ + c]; }
  [[nodiscard]] Matrix transposed() const;

 private:
  std::size_t n_;
  std::vector<double> values_;
};

/// Query/key/value projections acting on the channel axis, with the
/// logit scale 1/sqrt(d).
class ProjectionSet {
 public:
  ProjectionSet(Matrix w_q, Matrix w_k, Matrix w_v);

  static ProjectionSet identity(std::size_t channels);
  /// One Haar-distributed orthogonal matrix (Gram-Schmidt on a Gaussian
  /// matrix drawn from `rng`) shared by all three projections, so
  /// Q K^T equals the unprojected Gram matrix and W_v is undone by its
  /// transpose.
  static ProjectionSet random_orthogonal(std::size_t channels, const RngHandle& rng);

  [[nodiscard]] std::size_t channels() const noexcept { return w_q_.size(); }
  [[nodiscard]] const Matrix& w_q() const noexcept { return w_q_; }
  [[nodiscard]] const Matrix& w_k() const noexcept { return w_k_; }
  [[nodiscard]] const Matrix& w_v() const noexcept { return w_v_; }
  [[nodiscard]] double scale() const noexcept { return scale_; }

 private:
  Matrix w_q_;
  Matrix w_k_;
  Matrix w_v_;
  double scale_;
};

/// Per-sampling-step reference features, each shaped like one frame.
class IdBank {
 public:
  explicit IdBank(std::vector<FeatureGrid> entries);

  [[nodiscard]] std::size_t steps() const noexcept { return entries_.size(); }
  [[nodiscard]] const FeatureGrid& entry(std::size_t step) const;

 private:
  std::vector<FeatureGrid> entries_;
};

/// s_inj = (1 - lambda_id) s_t + lambda_id * bank; result is s_inj inside the
/// mask and s_t outside.
[[nodiscard]] FeatureSequence inject_identity(const FeatureSequence& state, const FeatureGrid& bank_entry,
                                              const MaskSequence& masks, const ControlParams& params);

/// Row-stochastic attention weights of frame t, (H*W) x (H*W) row-major:
/// softmax(scale * (q W_q)(kv W_k)^T) with max subtraction.
[[nodiscard]] std::vector<double> attention_weights(const FeatureSequence& q_source,
                                                    const FeatureSequence& kv_source,
                                                    const ProjectionSet& proj, std::size_t t);

/// Per-frame attention over spatial tokens: queries from q_source,
/// keys and values from kv_source.
[[nodiscard]] FeatureSequence disentangled_attention(const FeatureSequence& q_source,
                                                     const FeatureSequence& kv_source,
                                                     const ProjectionSet& proj);

/// disentangled_attention(x, x, proj).
[[nodiscard]] FeatureSequence self_attention(const FeatureSequence& x, const ProjectionSet& proj);

/// Multiplies every token (channel vector) by `m` on the right.
[[nodiscard]] FeatureSequence project_tokens(const FeatureSequence& x, const Matrix& m);

}  // namespace physattn::attention
