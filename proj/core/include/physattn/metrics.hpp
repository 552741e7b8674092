#pragma once

#include <cstddef>
#include <optional>

#include "physattn/types.hpp"

namespace physattn::metrics {

struct MetricConfig {
  double gamma_r = 0.1;
  double gamma_d = 0.1;
  double p = 4.0;

  /// Throws DomainError unless gamma_r, gamma_d > 0 and p >= 1.
  void validate() const;
};

/// Bounded scores and their soft-min aggregate.
struct QualityScores {
  double r_hat = 0.0;
  double d_hat = 0.0;
  double s = 0.0;
};

struct MetricReport {
  double r = 0.0;
  double d = 0.0;
  double r_hat = 0.0;
  double d_hat = 0.0;
  double s = 0.0;
  std::optional<double> adjacent_cosine;
  std::size_t frames = 0;
};

/// Mean L2 norm of open-boundary second differences over the T-2 interior
/// frames. Each frame is flattened to one vector. Throws DomainError if T < 3.
[[nodiscard]] double temporal_regularity(const FeatureSequence& f);

/// Mean L2 distance between consecutive frames. Throws DomainError if T < 2.
[[nodiscard]] double first_order_variation(const FeatureSequence& f);

/// R_hat = exp(-gamma_r R), D_hat = 1 - exp(-gamma_d D),
/// S = ((R_hat^-p + D_hat^-p) / 2)^(-1/p), with S = 0 when either score is 0.
[[nodiscard]] QualityScores storytelling_quality(double r, double d, const MetricConfig& cfg = {});

/// Mean cosine similarity of consecutive frames. Throws DomainError if T < 2
/// or any frame has zero norm.
[[nodiscard]] double adjacent_similarity(const FeatureSequence& f);

/// All of the above; the cosine term is skipped when `with_cosine` is false.
[[nodiscard]] MetricReport evaluate(const FeatureSequence& f, const MetricConfig& cfg = {},
                                    bool with_cosine = true);

}  // namespace physattn::metrics
