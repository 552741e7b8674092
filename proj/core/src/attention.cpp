#include "physattn/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "physattn/errors.hpp"

namespace physattn::attention {

namespace {

void require_same_shape(const FeatureSequence& a, const FeatureSequence& b) {
  if (a.frames() != b.frames()) throw ShapeError(ShapeFault::frame_count, "attention sources differ in frame count");
  if (a.height() != b.height()) throw ShapeError(ShapeFault::height, "attention sources differ in height");
  if (a.width() != b.width()) throw ShapeError(ShapeFault::width, "attention sources differ in width");
  if (a.channels() != b.channels()) throw ShapeError(ShapeFault::channels, "attention sources differ in depth");
}

// tokens (n x d) times m (d x d).
std::vector<double> multiply(std::span<const double> tokens, std::size_t d, const Matrix& m) {
  const std::size_t n = tokens.size() / d;
  std::vector<double> out(tokens.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double a = tokens[i * d + k];
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += a * m(k, j);
    }
  }
  return out;
}

// Softmax rows of scale * Q K^T.
std::vector<double> softmax_weights(std::span<const double> q, std::span<const double> k, std::size_t d,
                                    double scale) {
  const std::size_t n = q.size() / d;
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += q[i * d + c] * k[j * d + c];
      const double logit = scale * dot;
      if (!std::isfinite(logit)) throw DivergenceError("attention", i);
      w[i * n + j] = logit;
      row_max = std::max(row_max, logit);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      w[i * n + j] = std::exp(w[i * n + j] - row_max);
      total += w[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] /= total;
  }
  return w;
}

}  // namespace

Matrix::Matrix(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (n_ == 0) throw DomainError("matrix size must be at least 1");
  if (values_.size() != n_ * n_) throw ShapeError(ShapeFault::element_count, "matrix is not square");
  for (const double v : values_) {
    if (!std::isfinite(v)) throw ShapeError(ShapeFault::non_finite, "matrix entry is not finite");
  }
}

Matrix Matrix::identity(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Matrix(n, std::move(v));
}

Matrix Matrix::transposed() const {
  std::vector<double> v(values_.size());
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) v[c * n_ + r] = values_[r * n_ + c];
  }
  return Matrix(n_, std::move(v));
}

ProjectionSet::ProjectionSet(Matrix w_q, Matrix w_k, Matrix w_v)
    : w_q_(std::move(w_q)), w_k_(std::move(w_k)), w_v_(std::move(w_v)) {
  if (w_k_.size() != w_q_.size() || w_v_.size() != w_q_.size()) {
    throw ShapeError(ShapeFault::channels, "projection matrices differ in size");
  }
  scale_ = 1.0 / std::sqrt(static_cast<double>(w_q_.size()));
}

ProjectionSet ProjectionSet::identity(std::size_t channels) {
  return ProjectionSet(Matrix::identity(channels), Matrix::identity(channels), Matrix::identity(channels));
}

ProjectionSet ProjectionSet::random_orthogonal(std::size_t channels, const RngHandle& rng) {
  const std::size_t n = channels;
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.normal(i);

  // Modified Gram-Schmidt on the rows.
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t prev = 0; prev < r; ++prev) {
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += a[r * n + c] * a[prev * n + c];
      for (std::size_t c = 0; c < n; ++c) a[r * n + c] -= dot * a[prev * n + c];
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < n; ++c) norm += a[r * n + c] * a[r * n + c];
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw DomainError("degenerate draw while orthogonalizing projections");
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] /= norm;
  }
  Matrix q(n, std::move(a));
  return ProjectionSet(q, q, q);
}

IdBank::IdBank(std::vector<FeatureGrid> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DomainError("ID bank needs at least one entry");
  for (const auto& e : entries_) {
    if (e.shape() != entries_.front().shape()) {
      throw ShapeError(ShapeFault::element_count, "ID bank entries differ in shape");
    }
  }
}

const FeatureGrid& IdBank::entry(std::size_t step) const {
  if (step >= entries_.size()) throw DomainError("ID bank has no entry for step " + std::to_string(step));
  return entries_[step];
}

FeatureSequence inject_identity(const FeatureSequence& state, const FeatureGrid& bank_entry,
                                const MaskSequence& masks, const ControlParams& params) {
  validate_pair(state, masks);
  if (bank_entry.shape() != state.grid_shape()) {
    throw ShapeError(ShapeFault::element_count, "ID bank entry is not shaped like a frame");
  }
  const double lambda = params.lambda_id();
  const std::size_t n = state.frame_size();
  const std::size_t depth = state.channels();
  const auto s = state.values();
  const auto bank = bank_entry.values();
  const auto bits = masks.bits();

  std::vector<double> out(s.size());
  for (std::size_t t = 0; t < state.frames(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double here = s[t * n + i];
      const bool inside = bits[t * masks.positions() + i / depth] != 0;
      out[t * n + i] = inside ? (1.0 - lambda) * here + lambda * bank[i] : here;
    }
  }
  return FeatureSequence(state.frames(), state.grid_shape(), std::move(out));
}

std::vector<double> attention_weights(const FeatureSequence& q_source, const FeatureSequence& kv_source,
                                      const ProjectionSet& proj, std::size_t t) {
  require_same_shape(q_source, kv_source);
  if (proj.channels() != q_source.channels()) {
    throw ShapeError(ShapeFault::channels, "projection size does not match feature depth");
  }
  const std::size_t d = q_source.channels();
  const auto q = multiply(q_source.frame(t), d, proj.w_q());
  const auto k = multiply(kv_source.frame(t), d, proj.w_k());
  return softmax_weights(q, k, d, proj.scale());
}

FeatureSequence disentangled_attention(const FeatureSequence& q_source, const FeatureSequence& kv_source,
                                       const ProjectionSet& proj) {
  require_same_shape(q_source, kv_source);
  if (proj.channels() != q_source.channels()) {
    throw ShapeError(ShapeFault::channels, "projection size does not match feature depth");
  }
  const std::size_t d = q_source.channels();
  const std::size_t tokens = q_source.height() * q_source.width();
  std::vector<double> out(q_source.size(), 0.0);
  for (std::size_t t = 0; t < q_source.frames(); ++t) {
    const auto q = multiply(q_source.frame(t), d, proj.w_q());
    const auto k = multiply(kv_source.frame(t), d, proj.w_k());
    const auto v = multiply(kv_source.frame(t), d, proj.w_v());
    const auto w = softmax_weights(q, k, d, proj.scale());
    double* dst = out.data() + t * tokens * d;
    for (std::size_t i = 0; i < tokens; ++i) {
      for (std::size_t j = 0; j < tokens; ++j) {
        const double a = w[i * tokens + j];
        for (std::size_t c = 0; c < d; ++c) dst[i * d + c] += a * v[j * d + c];
      }
    }
  }
  return FeatureSequence(q_source.frames(), q_source.grid_shape(), std::move(out));
}

FeatureSequence self_attention(const FeatureSequence& x, const ProjectionSet& proj) {
  return disentangled_attention(x, x, proj);
}

FeatureSequence project_tokens(const FeatureSequence& x, const Matrix& m) {
  if (m.size() != x.channels()) throw ShapeError(ShapeFault::channels, "matrix size does not match feature depth");
  return FeatureSequence(x.frames(), x.grid_shape(), multiply(x.values(), x.channels(), m));
}

}  // namespace physattn::attention
