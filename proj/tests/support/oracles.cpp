#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

double flux(Rule rule, double s, double speed) {
  return rule == Rule::conservation_quadratic ? 0.5 * s * s : speed * s;
}

}  // namespace

std::vector<double> step(Rule rule, const Flat& s, const std::vector<double>& prev, double dtau, double coeff,
                         bool insulated) {
  const std::size_t T = s.frames, P = s.positions, D = s.depth;
  std::vector<double> out(s.values.size());
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t up = (t + 1) % T;
    const std::size_t down = (t + T - 1) % T;
    for (std::size_t p = 0; p < P; ++p) {
      const int m_here = s.mask[t * P + p];
      const int m_up = insulated ? s.mask[up * P + p] : 1;
      const int m_down = insulated ? s.mask[down * P + p] : 1;
      for (std::size_t c = 0; c < D; ++c) {
        const std::size_t i = (t * P + p) * D + c;
        const double here = s.values[i];
        const double a = m_up ? s.values[(up * P + p) * D + c] : here;
        const double b = m_down ? s.values[(down * P + p) * D + c] : here;
        if (insulated && m_here == 0) {
          out[i] = here;
          continue;
        }
        const double lap = a - 2.0 * here + b;
        switch (rule) {
          case Rule::identity:
            out[i] = here;
            break;
          case Rule::burgers:
            out[i] = here - dtau * here * (a - b) / 2.0;
            break;
          case Rule::wave:
          case Rule::elasticity:
            out[i] = 2.0 * here - prev[i] + coeff * lap;
            break;
          case Rule::conservation_linear:
          case Rule::conservation_quadratic:
            out[i] = here - dtau * (flux(rule, a, coeff) - flux(rule, b, coeff)) / 2.0;
            break;
          case Rule::heat:
            out[i] = here + dtau * coeff * lap;
            break;
        }
      }
    }
  }
  return out;
}

OtsuBest otsu_exhaustive(const std::vector<double>& values, std::size_t bins, double rel_tol) {
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == lo) return {};
  std::vector<std::size_t> bin(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double pos = (values[i] - lo) / (hi - lo) * static_cast<double>(bins);
    bin[i] = std::min(static_cast<std::size_t>(std::floor(pos)), bins - 1);
  }
  std::vector<double> score(bins, -1.0);
  for (std::size_t e = 1; e < bins; ++e) {
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (const std::size_t b : bin) {
      const double centre = static_cast<double>(b) + 0.5;
      if (b < e) {
        n0 += 1;
        s0 += centre;
      } else {
        n1 += 1;
        s1 += centre;
      }
    }
    if (n0 == 0 || n1 == 0) {
      score[e] = 0.0;
      continue;
    }
    const double n = n0 + n1;
    const double diff = s0 / n0 - s1 / n1;
    score[e] = (n0 / n) * (n1 / n) * diff * diff;
  }
  const double best = *std::max_element(score.begin() + 1, score.end());
  for (std::size_t e = 1; e < bins; ++e) {
    if (score[e] >= best - rel_tol * std::max(best, 1.0)) return {e, score[e]};
  }
  return {};
}

std::vector<double> attention_frame(const std::vector<double>& q, const std::vector<double>& kv, std::size_t tokens,
                                    std::size_t d, const std::vector<double>& wq, const std::vector<double>& wk,
                                    const std::vector<double>& wv) {
  auto project = [&](const std::vector<double>& x, const std::vector<double>& w) {
    std::vector<double> out(tokens * d, 0.0);
    for (std::size_t n = 0; n < tokens; ++n)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) out[n * d + j] += x[n * d + k] * w[k * d + j];
    return out;
  };
  const auto Q = project(q, wq);
  const auto K = project(kv, wk);
  const auto V = project(kv, wv);
  std::vector<double> out(tokens * d, 0.0);
  for (std::size_t i = 0; i < tokens; ++i) {
    std::vector<long double> logits(tokens);
    for (std::size_t j = 0; j < tokens; ++j) {
      long double dot = 0;
      for (std::size_t k = 0; k < d; ++k) dot += static_cast<long double>(Q[i * d + k]) * K[j * d + k];
      logits[j] = dot / std::sqrt(static_cast<long double>(d));
    }
    const long double peak = *std::max_element(logits.begin(), logits.end());
    long double total = 0;
    for (auto& l : logits) {
      l = std::exp(l - peak);
      total += l;
    }
    for (std::size_t j = 0; j < tokens; ++j)
      for (std::size_t k = 0; k < d; ++k) out[i * d + k] += static_cast<double>(logits[j] / total * V[j * d + k]);
  }
  return out;
}

long double soft_min(long double r_hat, long double d_hat, long double p) {
  if (r_hat == 0 || d_hat == 0) return 0;
  return std::pow((std::pow(r_hat, -p) + std::pow(d_hat, -p)) / 2, -1 / p);
}

physattn::FeatureSequence random_features(std::mt19937_64& gen, std::size_t frames, std::size_t h, std::size_t w,
                                          std::size_t d, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(frames * h * w * d);
  for (double& x : v) x = n(gen);
  return physattn::FeatureSequence(frames, {h, w, d}, std::move(v));
}

physattn::MaskSequence random_masks(std::mt19937_64& gen, std::size_t frames, std::size_t h, std::size_t w,
                                    double p_one) {
  std::bernoulli_distribution b(p_one);
  std::vector<std::uint8_t> bits(frames * h * w);
  for (auto& x : bits) x = b(gen) ? 1 : 0;
  return physattn::MaskSequence(frames, h, w, std::move(bits));
}

Flat flatten(const physattn::FeatureSequence& f, const physattn::MaskSequence& m) {
  Flat out;
  out.frames = f.frames();
  out.positions = f.height() * f.width();
  out.depth = f.channels();
  out.values.assign(f.values().begin(), f.values().end());
  out.mask.assign(m.bits().begin(), m.bits().end());
  return out;
}

}  // namespace oracle
