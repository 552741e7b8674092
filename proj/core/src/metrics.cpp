#include "physattn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "physattn/errors.hpp"

namespace physattn::metrics {

void MetricConfig::validate() const {
  if (!(std::isfinite(gamma_r) && gamma_r > 0.0)) throw DomainError("gamma_r must be positive");
  if (!(std::isfinite(gamma_d) && gamma_d > 0.0)) throw DomainError("gamma_d must be positive");
  if (!(std::isfinite(p) && p >= 1.0)) throw DomainError("p must be at least 1");
}

double temporal_regularity(const FeatureSequence& f) {
  const std::size_t frames = f.frames();
  if (frames < 3) throw DomainError("temporal regularity needs T >= 3, got " + std::to_string(frames));
  const std::size_t n = f.frame_size();
  const auto v = f.values();
  double total = 0.0;
  for (std::size_t t = 1; t + 1 < frames; ++t) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dd = v[(t + 1) * n + i] - 2.0 * v[t * n + i] + v[(t - 1) * n + i];
      sq += dd * dd;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(frames - 2);
}

double first_order_variation(const FeatureSequence& f) {
  const std::size_t frames = f.frames();
  if (frames < 2) throw DomainError("first-order variation needs T >= 2, got " + std::to_string(frames));
  const std::size_t n = f.frame_size();
  const auto v = f.values();
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dd = v[(t + 1) * n + i] - v[t * n + i];
      sq += dd * dd;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(frames - 1);
}

QualityScores storytelling_quality(double r, double d, const MetricConfig& cfg) {
  cfg.validate();
  if (!(r >= 0.0) || !(d >= 0.0)) throw DomainError("R and D must be nonnegative");
  QualityScores q;
  q.r_hat = std::exp(-cfg.gamma_r * r);
  q.d_hat = -std::expm1(-cfg.gamma_d * d);
  const double lo = std::min(q.r_hat, q.d_hat);
  if (lo <= 0.0) {
    q.s = 0.0;
    return q;
  }
  // Factor out the smaller score so both ratios are <= 1 and nothing overflows.
  const double a = std::pow(lo / q.r_hat, cfg.p);
  const double b = std::pow(lo / q.d_hat, cfg.p);
  q.s = lo * std::pow((a + b) / 2.0, -1.0 / cfg.p);
  return q;
}

double adjacent_similarity(const FeatureSequence& f) {
  const std::size_t frames = f.frames();
  if (frames < 2) throw DomainError("adjacent similarity needs T >= 2");
  const std::size_t n = f.frame_size();
  const auto v = f.values();
  std::vector<double> norms(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += v[t * n + i] * v[t * n + i];
    norms[t] = std::sqrt(sq);
    if (norms[t] == 0.0) throw DomainError("frame " + std::to_string(t) + " has zero norm");
  }
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[t * n + i] * v[(t + 1) * n + i];
    total += std::clamp(dot / (norms[t] * norms[t + 1]), -1.0, 1.0);
  }
  return total / static_cast<double>(frames - 1);
}

MetricReport evaluate(const FeatureSequence& f, const MetricConfig& cfg, bool with_cosine) {
  MetricReport report;
  report.frames = f.frames();
  report.r = temporal_regularity(f);
  report.d = first_order_variation(f);
  const QualityScores q = storytelling_quality(report.r, report.d, cfg);
  report.r_hat = q.r_hat;
  report.d_hat = q.d_hat;
  report.s = q.s;
  if (with_cosine) report.adjacent_cosine = adjacent_similarity(f);
  return report;
}

}  // namespace physattn::metrics
